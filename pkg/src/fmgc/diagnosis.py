"""Minimal conflicts, minimal diagnoses and their group-aware ranking.

Conflicts come from the recursive divide-and-conquer preferred-conflict
algorithm; diagnoses from a breadth-first hitting-set tree over those
conflicts with superset pruning and node reuse. A diagnosis is scored by
the most adaptations it forces on any single member, and the report is
ordered so the least disruptive repair comes first.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .analysis import ModelSat
from .errors import (
    ConsistentDecisionsError,
    InvalidIndexError,
    StaleReportError,
    VoidModelError,
)
from .model import Decision, FeatureModel
from .preferences import (
    ConflictRecord,
    Session,
    SessionPhase,
    effective_preferences,
)

DEFAULT_MAX_DIAGNOSES = 20
DEFAULT_MAX_CARD = 4


@dataclass(frozen=True)
class ConflictSet:
    decisions: frozenset[Decision]

    def sorted(self) -> list[Decision]:
        return sorted(self.decisions, key=lambda d: d.feature)


@dataclass(frozen=True)
class Diagnosis:
    retract: frozenset[Decision]
    member_adaptations: dict[str, int] | None = None
    group_score: int | None = None

    def features(self) -> list[str]:
        return sorted(d.feature for d in self.retract)


@dataclass(frozen=True)
class DiagnosisReport:
    diagnoses: tuple[Diagnosis, ...]
    complete: bool
    decisions: frozenset[Decision] = frozenset()
    ranked: bool = False
    session_revision: int | None = None


def _sorted_decisions(decisions) -> list[Decision]:
    return sorted(decisions, key=lambda d: d.feature)


def quickxplain(model: FeatureModel, decisions) -> ConflictSet | None:
    """Subset-minimal conflict among the decisions, or None if consistent.

    Decisions are considered in feature-name order, which fixes which of
    several minimal conflicts is preferred.
    """
    sat = ModelSat(model)
    ordered = _sorted_decisions(decisions)
    if sat.consistent(ordered):
        return None
    if not sat.consistent(()):
        raise VoidModelError("the feature model itself admits no configuration")
    return ConflictSet(frozenset(_qx(sat, [], False, ordered)))


def _qx(sat: ModelSat, background: list[Decision], delta_added: bool,
        candidates: list[Decision]) -> list[Decision]:
    if delta_added and not sat.consistent(background):
        return []
    if len(candidates) == 1:
        return list(candidates)
    half = len(candidates) // 2
    left, right = candidates[:half], candidates[half:]
    d2 = _qx(sat, background + left, bool(left), right)
    d1 = _qx(sat, background + d2, bool(d2), left)
    return d1 + d2


def enumerate_diagnoses(
    model: FeatureModel,
    decisions,
    max_diagnoses: int = DEFAULT_MAX_DIAGNOSES,
    max_card: int = DEFAULT_MAX_CARD,
) -> DiagnosisReport:
    """All subset-minimal retraction sets restoring consistency.

    Breadth-first hitting-set search: each tree node is the set of decisions
    retracted on its path; conflicting nodes branch on every element of a
    minimal conflict among the remaining decisions. Cached conflicts are
    reused when they do not intersect the path, supersets of found diagnoses
    are pruned, and duplicate paths collapse. ``complete`` is False iff
    either limit actually cut the search off.
    """
    if max_diagnoses < 1 or max_card < 1:
        raise ValueError("limits must be positive")
    sat = ModelSat(model)
    all_decisions = _sorted_decisions(decisions)
    if sat.consistent(all_decisions):
        raise ConsistentDecisionsError("decisions are already consistent with the model")
    if not sat.consistent(()):
        raise VoidModelError("the feature model itself admits no configuration")

    conflict_cache: list[frozenset[Decision]] = []

    def conflict_for(path: frozenset[Decision]) -> frozenset[Decision]:
        for cached in conflict_cache:
            if not cached & path:
                return cached
        remaining = [d for d in all_decisions if d not in path]
        found = frozenset(_qx(sat, [], False, remaining))
        conflict_cache.append(found)
        return found

    diagnoses: list[frozenset[Decision]] = []
    queue: list[frozenset[Decision]] = [frozenset()]
    seen: set[frozenset[Decision]] = {frozenset()}
    truncated = False
    qi = 0
    while qi < len(queue):
        path = queue[qi]
        qi += 1
        if any(d <= path for d in diagnoses):
            continue
        if sat.consistent([d for d in all_decisions if d not in path]):
            diagnoses.append(path)
            if len(diagnoses) == max_diagnoses:
                if any(not any(d <= p for d in diagnoses) for p in queue[qi:]):
                    truncated = True
                break
            continue
        if len(path) == max_card:
            truncated = True
            continue
        for decision in _sorted_decisions(conflict_for(path)):
            child = path | {decision}
            if child not in seen:
                seen.add(child)
                queue.append(child)

    return DiagnosisReport(
        diagnoses=tuple(Diagnosis(d) for d in diagnoses),
        complete=not truncated,
        decisions=frozenset(all_decisions),
    )


def rank_diagnoses(report: DiagnosisReport, session: Session) -> DiagnosisReport:
    """Score and order diagnoses by their worst-member adaptation count.

    A member's adaptation count for a diagnosis is the number of retracted
    decisions matching that member's own effective position; the group
    score is the worst member's count. Ascending group score, then fewer
    retractions, then feature names decide the order.
    """
    decision_set = session.decision_set()
    for diagnosis in report.diagnoses:
        missing = diagnosis.retract - decision_set
        if missing:
            d = next(iter(missing))
            raise StaleReportError(
                f"retracted decision {d!r} is not a current group decision"
            )
    effective = {m: effective_preferences(session, m) for m in session.members}

    ranked: list[Diagnosis] = []
    for diagnosis in report.diagnoses:
        adaptations = {
            member: sum(
                1
                for d in diagnosis.retract
                if effective[member][d.feature].value is d.value
            )
            for member in session.members
        }
        ranked.append(
            replace(
                diagnosis,
                member_adaptations=adaptations,
                group_score=max(adaptations.values(), default=0),
            )
        )
    ranked.sort(key=lambda d: (d.group_score, len(d.retract), d.features()))
    return replace(
        report,
        diagnoses=tuple(ranked),
        ranked=True,
        session_revision=session.revision,
    )


def apply_diagnosis(session: Session, index: int) -> Session:
    """Retract one diagnosis' decisions and reopen the features for discussion."""
    report = session.diagnosis_report
    if report is None or not report.ranked:
        raise StaleReportError("no ranked diagnosis report is attached to the session")
    if report.session_revision != session.revision:
        raise StaleReportError("the session changed after the report was ranked")
    if not 0 <= index < len(report.diagnoses):
        raise InvalidIndexError(
            f"diagnosis index {index} out of range (have {len(report.diagnoses)})"
        )

    diagnosis = report.diagnoses[index]
    effective = {m: effective_preferences(session, m) for m in session.members}
    for decision in _sorted_decisions(diagnosis.retract):
        session.group_decisions.pop(decision.feature, None)
        positions = {
            m: prefs[decision.feature].value
            for m, prefs in effective.items()
            if prefs[decision.feature].known
        }
        provenance = {
            m: prefs[decision.feature].provenance
            for m, prefs in effective.items()
            if prefs[decision.feature].known
        }
        session.conflicts = [c for c in session.conflicts if c.feature != decision.feature]
        session.conflicts.append(ConflictRecord(decision.feature, positions, provenance))

    session.diagnosis_report = None
    session.phase = SessionPhase.AGGREGATION
    session.touch()
    return session
