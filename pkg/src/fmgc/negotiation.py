"""Session workflow: phases, conflict negotiation and reconfiguration.

The phase machine routes a session from preference elicitation through
prediction and aggregation into negotiation (open preference conflicts),
diagnosis (decisions inconsistent with the model) or completion. Conflict
resolution follows a win-win discipline: a proposal resolves its conflict
only once every member has accepted it, at which point the agreed value
becomes everyone's stated preference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .analysis import ModelSat
from .diagnosis import enumerate_diagnoses, rank_diagnoses
from .errors import (
    ConflictStateError,
    ModelEditError,
    UnknownProposalError,
)
from .grouprec import AggregationStrategy, aggregate_preferences, predict_feature_preference
from .model import (
    Expr,
    Pref,
    Relation,
    is_excludes_pair,
    parse_expr,
)
from .preferences import (
    ConflictRecord,
    ConflictStatus,
    Session,
    SessionPhase,
)

__all__ = [
    "SessionPhase",
    "LEGAL_TRANSITIONS",
    "Proposal",
    "PatternKind",
    "NegotiationPattern",
    "detect_conflicts",
    "generate_patterns",
    "propose",
    "accept",
    "step",
    "reconfigure",
    "SetPreferenceChange",
    "AddFeatureChange",
    "AddConstraintChange",
]

# Reconfiguration (including single preference edits) may re-enter
# aggregation from anywhere; everything else follows the pipeline.
LEGAL_TRANSITIONS: frozenset[tuple[SessionPhase, SessionPhase]] = frozenset(
    {
        (SessionPhase.ELICITATION, SessionPhase.PREDICTION),
        (SessionPhase.PREDICTION, SessionPhase.AGGREGATION),
        (SessionPhase.AGGREGATION, SessionPhase.NEGOTIATION),
        (SessionPhase.AGGREGATION, SessionPhase.DIAGNOSIS),
        (SessionPhase.AGGREGATION, SessionPhase.COMPLETE),
        (SessionPhase.NEGOTIATION, SessionPhase.AGGREGATION),
        (SessionPhase.DIAGNOSIS, SessionPhase.AGGREGATION),
    }
    | {(phase, SessionPhase.AGGREGATION) for phase in SessionPhase}
)


@dataclass
class Proposal:
    id: str
    feature: str
    value: Pref
    proposer: str
    rationale: str
    acceptances: set[str] = field(default_factory=set)


class PatternKind(str, Enum):
    SUGGEST_ALTERNATIVE = "suggest_alternative"
    CITE_CONSTRAINT = "cite_constraint"
    SPLIT_DECISION = "split_decision"


@dataclass(frozen=True)
class NegotiationPattern:
    kind: PatternKind
    feature: str
    alternative: str | None
    text: str
    evidence: tuple[int, ...]


def detect_conflicts(session: Session) -> list[ConflictRecord]:
    """Open conflicts from the latest aggregation, ordered by feature name."""
    return sorted(session.open_conflicts(), key=lambda c: c.feature)


def generate_patterns(session: Session, conflict: ConflictRecord) -> list[NegotiationPattern]:
    """Deterministic discussion prompts for one open conflict.

    Alternatives come from group siblings and from pairwise-excludes
    constraints; every constraint mentioning the feature is citable; a
    deferral option is always offered last.
    """
    if not conflict.open:
        raise ConflictStateError(f"conflict on '{conflict.feature}' is already resolved")
    model = session.model
    feature = conflict.feature
    model.require_feature(feature)

    suggestions: list[NegotiationPattern] = []
    group = model.group_of(feature)
    if group is not None:
        for sibling in group.members:
            if sibling == feature:
                continue
            reason = f"the {group.kind.value} group under {group.parent}"
            suggestions.append(
                NegotiationPattern(
                    PatternKind.SUGGEST_ALTERNATIVE,
                    feature,
                    sibling,
                    _alternative_text(feature, reason, sibling),
                    (),
                )
            )
    for constraint in model.constraints:
        for other in sorted(constraint.atoms - {feature}):
            if is_excludes_pair(constraint.expr, feature, other):
                reason = f"constraint c{constraint.id}: {constraint.text}"
                suggestions.append(
                    NegotiationPattern(
                        PatternKind.SUGGEST_ALTERNATIVE,
                        feature,
                        other,
                        _alternative_text(feature, reason, other),
                        (constraint.id,),
                    )
                )
    suggestions.sort(key=lambda p: (p.alternative, p.evidence))

    citations = [
        NegotiationPattern(
            PatternKind.CITE_CONSTRAINT,
            feature,
            None,
            f"Constraint c{c.id} applies to {feature}: {c.text}",
            (c.id,),
        )
        for c in model.constraints_mentioning(feature)
    ]

    split = NegotiationPattern(
        PatternKind.SPLIT_DECISION,
        feature,
        None,
        f"defer {feature}: mark Unstated and revisit after other decisions",
        (),
    )
    return suggestions + citations + [split]


def _alternative_text(feature: str, reason: str, alternative: str) -> str:
    return (
        f"We shouldn't include the feature {feature} since it conflicts with "
        f"{reason}; the feature {alternative} could be an alternative"
    )


def propose(
    session: Session, conflict: ConflictRecord, proposer: str, value: Pref, rationale: str = ""
) -> Proposal:
    """Open a win-win proposal for one conflicted feature."""
    session.require_member(proposer)
    if value not in (Pref.INCLUDE, Pref.EXCLUDE):
        raise ValueError("a proposal must take a definite include/exclude value")
    if not conflict.open:
        raise ConflictStateError(f"conflict on '{conflict.feature}' is already resolved")
    if session.conflict_for(conflict.feature) is not conflict:
        raise ConflictStateError(f"conflict on '{conflict.feature}' is not part of this session")
    session._proposal_seq += 1
    proposal = Proposal(
        id=f"p{session._proposal_seq}",
        feature=conflict.feature,
        value=value,
        proposer=proposer,
        rationale=rationale,
    )
    session.proposals[proposal.id] = proposal
    session.touch()
    return proposal


def accept(session: Session, proposal_id: str, member: str) -> Session:
    """Accept a proposal; unanimous acceptance resolves the conflict.

    Duplicate acceptance is a no-op. On resolution the agreed value is
    written into every member's stated preferences, and once no open
    conflicts remain the session re-aggregates.
    """
    session.require_member(member)
    proposal = session.proposals.get(proposal_id)
    if proposal is None:
        raise UnknownProposalError(f"unknown proposal '{proposal_id}'")
    conflict = session.conflict_for(proposal.feature)
    if conflict is None or not conflict.open:
        raise ConflictStateError(f"conflict on '{proposal.feature}' is not open")
    if member in proposal.acceptances:
        return session

    proposal.acceptances.add(member)
    session.touch()
    if set(session.members) <= proposal.acceptances:
        conflict.resolve(proposal.value)
        for m in session.members:
            session.stated[m][proposal.feature] = proposal.value
        if not session.open_conflicts():
            _run_aggregation(session)
            session.phase = SessionPhase.AGGREGATION
    return session


# --------------------------------------------------------------------------
# Phase machine
# --------------------------------------------------------------------------


def step(session: Session) -> Session:
    """Advance the session one legal phase transition.

    Elicitation runs predictions; prediction runs aggregation; aggregation
    routes to negotiation, diagnosis or completion based on the current
    state. Negotiation and diagnosis only move on via their own operations,
    and stepping a complete session is a no-op.
    """
    phase = session.phase
    if phase is SessionPhase.ELICITATION:
        _run_predictions(session)
        session.phase = SessionPhase.PREDICTION
        session.touch()
    elif phase is SessionPhase.PREDICTION:
        _run_aggregation(session)
        session.phase = SessionPhase.AGGREGATION
        session.touch()
    elif phase is SessionPhase.AGGREGATION:
        session.touch()  # before routing: an attached report must see the final revision
        session.phase = _route_from_aggregation(session)
    elif phase is SessionPhase.NEGOTIATION:
        if not session.open_conflicts():
            _run_aggregation(session)
            session.phase = SessionPhase.AGGREGATION
            session.touch()
    return session


def _route_from_aggregation(session: Session) -> SessionPhase:
    if session.open_conflicts():
        return SessionPhase.NEGOTIATION
    sat = ModelSat(session.model)
    if not sat.consistent(session.decision_set()):
        _attach_diagnosis_report(session)
        return SessionPhase.DIAGNOSIS
    return SessionPhase.COMPLETE


def _attach_diagnosis_report(session: Session) -> None:
    report = enumerate_diagnoses(session.model, session.decision_set())
    session.diagnosis_report = rank_diagnoses(report, session)


def _run_predictions(session: Session) -> None:
    matrix = session.choice_matrix
    session.predicted = {member: {} for member in session.members}
    if matrix is None:
        return
    for member in session.members:
        if member not in matrix.members:
            continue
        for feature in session.model.features:
            if feature not in matrix.items:
                continue
            p = predict_feature_preference(member, feature, matrix, session.neighborhood_size)
            if p is not None:
                session.predicted[member][feature] = p


def _run_aggregation(
    session: Session, strategy: AggregationStrategy = AggregationStrategy.UNANIMITY_MERGE
) -> None:
    """Recompute decisions and open conflicts from effective preferences.

    Resolved conflict records are kept for display as long as their feature
    stays decided; features that conflict anew get a fresh open record.
    """
    decisions, open_conflicts = aggregate_preferences(session, strategy)
    conflicted = {c.feature for c in open_conflicts}
    kept = [
        c
        for c in session.conflicts
        if c.status is ConflictStatus.RESOLVED and c.feature not in conflicted
    ]
    session.group_decisions = {d.feature: d.value for d in decisions}
    session.conflicts = kept + open_conflicts
    session.diagnosis_report = None
    live_features = {c.feature for c in session.conflicts} | set(session.group_decisions)
    session.proposals = {
        pid: p for pid, p in session.proposals.items() if p.feature in live_features
    }


# --------------------------------------------------------------------------
# Reconfiguration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SetPreferenceChange:
    member: str
    feature: str
    value: Pref


@dataclass(frozen=True)
class AddFeatureChange:
    feature: str
    parent: str
    relation: Relation


@dataclass(frozen=True)
class AddConstraintChange:
    expr: Expr | str


Change = SetPreferenceChange | AddFeatureChange | AddConstraintChange


def reconfigure(session: Session, changes: list[Change]) -> Session:
    """Apply preference and model changes, then re-aggregate.

    Model edits are validated against a working copy first, so a failing
    change list leaves the session untouched. New features enter as leaf
    children; predictions are recomputed; if the re-aggregated decisions
    are inconsistent the session lands in diagnosis with a fresh ranked
    report, otherwise in aggregation.
    """
    model = session.model.copy()
    preference_edits: list[SetPreferenceChange] = []
    for change in changes:
        if isinstance(change, AddFeatureChange):
            if change.relation not in (Relation.MANDATORY, Relation.OPTIONAL):
                raise ModelEditError("new features must be mandatory or optional children")
            model.add_child(change.parent, change.feature, change.relation)
        elif isinstance(change, AddConstraintChange):
            expr = parse_expr(change.expr) if isinstance(change.expr, str) else change.expr
            model.add_constraint(expr)
        elif isinstance(change, SetPreferenceChange):
            session.require_member(change.member)
            if not model.has_feature(change.feature):
                raise ModelEditError(
                    f"preference change references unknown feature '{change.feature}'"
                )
            preference_edits.append(change)
        else:
            raise TypeError(f"unsupported change {change!r}")

    session.model = model
    for edit in preference_edits:
        if edit.value is Pref.UNSTATED:
            session.stated[edit.member].pop(edit.feature, None)
        else:
            session.stated[edit.member][edit.feature] = edit.value

    _run_predictions(session)
    _run_aggregation(session)
    session.phase = SessionPhase.AGGREGATION
    session.touch()
    sat = ModelSat(session.model)
    if not sat.consistent(session.decision_set()):
        session.phase = SessionPhase.DIAGNOSIS
        _attach_diagnosis_report(session)
    return session
