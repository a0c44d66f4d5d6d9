"""Stakeholder preference state and historical interaction data.

The :class:`Session` here is the shared data model for aggregation,
negotiation and diagnosis. Mutation happens only through module-level
operations (or methods they call); each mutation bumps ``revision`` so
downstream artifacts such as diagnosis reports can detect staleness.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from .errors import (
    MatrixFormatError,
    PhaseError,
    UnknownItemError,
    UnknownMemberError,
)
from .model import FeatureModel, Pref

if TYPE_CHECKING:  # circular at runtime: diagnosis builds on sessions
    from .diagnosis import DiagnosisReport
    from .negotiation import Proposal

from .model import Decision  # noqa: E402  (re-exported for convenience)

__all__ = [
    "ItemKind",
    "InteractionMatrix",
    "load_interactions",
    "SessionPhase",
    "Provenance",
    "EffectivePref",
    "ConflictStatus",
    "ConflictRecord",
    "Session",
    "set_preference",
    "effective_preferences",
    "constraint_item",
]


class ItemKind(str, Enum):
    CONSTRAINT_ORDER = "order"
    FEATURE_CHOICE = "choice"


def constraint_item(cid: int) -> str:
    """Matrix item id for a constraint ordinal (``1 -> "c1"``)."""
    return f"c{cid}"


@dataclass(frozen=True)
class InteractionMatrix:
    """Member × item ratings; visit ranks or 0/1 inclusion choices."""

    item_kind: ItemKind
    members: tuple[str, ...]
    items: tuple[str, ...]
    ratings: dict[tuple[str, str], float]

    def __post_init__(self) -> None:
        members = set(self.members)
        items = set(self.items)
        per_member_ranks: dict[str, set[float]] = {}
        for (member, item), rating in self.ratings.items():
            if member not in members:
                raise UnknownMemberError(f"rating references unknown member '{member}'")
            if item not in items:
                raise UnknownItemError(f"rating references unknown item '{item}'")
            if self.item_kind is ItemKind.CONSTRAINT_ORDER:
                if rating < 1 or rating != int(rating):
                    raise MatrixFormatError(
                        f"visit rank for ({member},{item}) must be a positive integer"
                    )
                ranks = per_member_ranks.setdefault(member, set())
                if rating in ranks:
                    raise MatrixFormatError(
                        f"member '{member}' has duplicate visit rank {int(rating)}"
                    )
                ranks.add(rating)
            elif rating not in (0.0, 1.0):
                raise MatrixFormatError(
                    f"choice rating for ({member},{item}) must be 0 or 1"
                )

    def rating(self, member: str, item: str) -> float | None:
        return self.ratings.get((member, item))

    def items_rated_by(self, member: str) -> list[str]:
        return [i for i in self.items if (member, i) in self.ratings]

    def require_member(self, member: str) -> None:
        if member not in self.members:
            raise UnknownMemberError(f"unknown member '{member}'")

    def require_item(self, item: str) -> None:
        if item not in self.items:
            raise UnknownItemError(f"unknown item '{item}'")

    def without(self, member: str, item: str) -> "InteractionMatrix":
        """Copy with one rating held out (for leave-one-out evaluation)."""
        ratings = dict(self.ratings)
        ratings.pop((member, item), None)
        return InteractionMatrix(self.item_kind, self.members, self.items, ratings)


def load_interactions(text: str, kind: ItemKind) -> InteractionMatrix:
    """Parse the ``member,item,rating`` CSV into a matrix.

    Members and items are ordered by first appearance; all matrix
    invariants are enforced here.
    """
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise MatrixFormatError("empty interaction data: missing header")
    if [cell.strip() for cell in rows[0]] != ["member", "item", "rating"]:
        raise MatrixFormatError("header must be 'member,item,rating'", line=1)

    members: list[str] = []
    items: list[str] = []
    ratings: dict[tuple[str, str], float] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise MatrixFormatError(f"expected 3 fields, got {len(row)}", line=lineno)
        member, item, raw = (cell.strip() for cell in row)
        if not member or not item:
            raise MatrixFormatError("member and item must be non-empty", line=lineno)
        try:
            rating = float(raw)
        except ValueError:
            raise MatrixFormatError(f"rating '{raw}' is not a number", line=lineno) from None
        if (member, item) in ratings:
            raise MatrixFormatError(f"duplicate rating for ({member},{item})", line=lineno)
        if member not in members:
            members.append(member)
        if item not in items:
            items.append(item)
        ratings[(member, item)] = rating

    return InteractionMatrix(kind, tuple(members), tuple(items), ratings)


# --------------------------------------------------------------------------
# Session state
# --------------------------------------------------------------------------


class SessionPhase(str, Enum):
    ELICITATION = "elicitation"
    PREDICTION = "prediction"
    AGGREGATION = "aggregation"
    NEGOTIATION = "negotiation"
    DIAGNOSIS = "diagnosis"
    COMPLETE = "complete"


class Provenance(str, Enum):
    STATED = "stated"
    PREDICTED = "predicted"


@dataclass(frozen=True)
class EffectivePref:
    """A member's position on a feature; value None means unknown."""

    value: Pref | None
    provenance: Provenance | None

    @property
    def known(self) -> bool:
        return self.value is not None


UNKNOWN = EffectivePref(None, None)


class ConflictStatus(str, Enum):
    OPEN = "open"
    RESOLVED = "resolved"


@dataclass
class ConflictRecord:
    feature: str
    positions: dict[str, Pref]
    provenance: dict[str, Provenance]
    status: ConflictStatus = ConflictStatus.OPEN
    resolved_value: Pref | None = None

    def resolve(self, value: Pref) -> None:
        self.status = ConflictStatus.RESOLVED
        self.resolved_value = value

    @property
    def open(self) -> bool:
        return self.status is ConflictStatus.OPEN


@dataclass
class Session:
    """Group configuration state for one feature model."""

    id: str
    model: FeatureModel
    members: list[str]
    stated: dict[str, dict[str, Pref]] = field(default_factory=dict)
    predicted: dict[str, dict[str, float]] = field(default_factory=dict)
    visited_constraints: dict[str, list[int]] = field(default_factory=dict)
    group_decisions: dict[str, Pref] = field(default_factory=dict)
    conflicts: list[ConflictRecord] = field(default_factory=list)
    proposals: dict[str, "Proposal"] = field(default_factory=dict)
    phase: SessionPhase = SessionPhase.ELICITATION
    prediction_threshold: float = 0.5
    diagnosis_report: "DiagnosisReport | None" = None
    order_matrix: InteractionMatrix | None = None
    choice_matrix: InteractionMatrix | None = None
    neighborhood_size: int = 3
    revision: int = 0
    _proposal_seq: int = 0

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("a session needs at least one member")
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate member names")
        for member in self.members:
            self.stated.setdefault(member, {})
            self.predicted.setdefault(member, {})
            self.visited_constraints.setdefault(member, [])

    # -- guards --------------------------------------------------------------

    def require_member(self, member: str) -> None:
        if member not in self.stated:
            raise UnknownMemberError(f"unknown member '{member}'")

    def touch(self) -> None:
        self.revision += 1

    # -- queries --------------------------------------------------------------

    def decision_set(self) -> frozenset[Decision]:
        return frozenset(Decision(f, v) for f, v in self.group_decisions.items())

    def open_conflicts(self) -> list[ConflictRecord]:
        return [c for c in self.conflicts if c.open]

    def conflict_for(self, feature: str) -> ConflictRecord | None:
        for record in self.conflicts:
            if record.feature == feature:
                return record
        return None

    def visit_rank(self, member: str, cid: int) -> int | None:
        """1-based position of a constraint in the member's visit order."""
        visits = self.visited_constraints.get(member, [])
        return visits.index(cid) + 1 if cid in visits else None

    def record_constraint_visit(self, member: str, cid: int) -> None:
        self.require_member(member)
        self.model.constraint(cid)
        visits = self.visited_constraints[member]
        if cid not in visits:
            visits.append(cid)
            self.touch()

    def matrix_for(self, kind: ItemKind) -> InteractionMatrix | None:
        if kind is ItemKind.CONSTRAINT_ORDER:
            return self.order_matrix
        return self.choice_matrix


def set_preference(session: Session, member: str, feature: str, value: Pref) -> Session:
    """Record (or clear, for UNSTATED) a stated preference.

    Only the edited feature's downstream state is invalidated: its group
    decision, conflict record and proposals are dropped and recomputed.
    Past the elicitation/prediction phases this counts as a (single-change)
    reconfiguration, so the session re-enters aggregation.
    """
    session.require_member(member)
    session.model.require_feature(feature)
    if session.phase is SessionPhase.DIAGNOSIS:
        raise PhaseError("preferences cannot be edited while a diagnosis is pending; "
                         "apply a diagnosis or reconfigure instead")

    if value is Pref.UNSTATED:
        session.stated[member].pop(feature, None)
    else:
        session.stated[member][feature] = value

    session.group_decisions.pop(feature, None)
    session.conflicts = [c for c in session.conflicts if c.feature != feature]
    session.proposals = {
        pid: p for pid, p in session.proposals.items() if p.feature != feature
    }
    session.diagnosis_report = None
    if session.phase in (SessionPhase.AGGREGATION, SessionPhase.NEGOTIATION, SessionPhase.COMPLETE):
        from .grouprec import aggregate_preferences  # deferred: grouprec builds on this module

        decisions, conflicts = aggregate_preferences(session, features=[feature])
        for decision in decisions:
            session.group_decisions[decision.feature] = decision.value
        session.conflicts.extend(conflicts)
        session.phase = SessionPhase.AGGREGATION
    session.touch()
    return session


def effective_preferences(session: Session, member: str) -> dict[str, EffectivePref]:
    """Stated value if present, else thresholded prediction, else unknown."""
    session.require_member(member)
    out: dict[str, EffectivePref] = {}
    stated = session.stated[member]
    predicted = session.predicted[member]
    for feature in session.model.features:
        if feature in stated:
            out[feature] = EffectivePref(stated[feature], Provenance.STATED)
        elif feature in predicted:
            value = Pref.INCLUDE if predicted[feature] >= session.prediction_threshold else Pref.EXCLUDE
            out[feature] = EffectivePref(value, Provenance.PREDICTED)
        else:
            out[feature] = UNKNOWN
    return out
