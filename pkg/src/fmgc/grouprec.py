"""User-based collaborative filtering and group aggregation.

Predictions use k-nearest-neighbor CF with Pearson similarity and a
mean-centered weighted average: the target member is centered on their own
rating mean, each neighbor on their mean over the items co-rated with the
target. Centering neighbors on the co-rated overlap makes a member with an
identical rating history reproduce held-out ratings exactly, which is the
behavior the evaluation harness relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import sqrt

from .errors import AlreadyRatedError, KindMismatchError
from .model import Decision, Pref, constraint_importance
from .preferences import (
    ConflictRecord,
    InteractionMatrix,
    ItemKind,
    Session,
    constraint_item,
    effective_preferences,
)

DEFAULT_NEIGHBORS = 3


class AggregationStrategy(str, Enum):
    UNANIMITY_MERGE = "unanimity"
    AVERAGE = "average"
    MAJORITY = "majority"
    LEAST_MISERY = "least_misery"
    MOST_PLEASURE = "most_pleasure"


class TieBreak(str, Enum):
    NONE = "none"
    IMPORTANCE = "importance"
    LEXICOGRAPHIC = "lexicographic"


@dataclass(frozen=True)
class NextConstraintRecommendation:
    constraint: int
    group_score: float | None  # None when chosen by the cold-start heuristic
    tie_break_used: TieBreak


def similarity(u: str, v: str, m: InteractionMatrix) -> float:
    """Pearson correlation over co-rated items; 0 when undefined.

    Fewer than two co-rated items, or zero variance on either co-rated
    vector, yields 0.
    """
    m.require_member(u)
    m.require_member(v)
    co_rated = [i for i in m.items if (u, i) in m.ratings and (v, i) in m.ratings]
    if len(co_rated) < 2:
        return 0.0
    us = [m.ratings[(u, i)] for i in co_rated]
    vs = [m.ratings[(v, i)] for i in co_rated]
    mean_u = sum(us) / len(us)
    mean_v = sum(vs) / len(vs)
    num = sum((a - mean_u) * (b - mean_v) for a, b in zip(us, vs))
    den_u = sqrt(sum((a - mean_u) ** 2 for a in us))
    den_v = sqrt(sum((b - mean_v) ** 2 for b in vs))
    if den_u == 0.0 or den_v == 0.0:
        return 0.0
    return num / (den_u * den_v)


def predict_rating(u: str, item: str, m: InteractionMatrix, k: int = DEFAULT_NEIGHBORS) -> float | None:
    """kNN prediction of a missing rating; None when unpredictable."""
    m.require_member(u)
    m.require_item(item)
    if (u, item) in m.ratings:
        raise AlreadyRatedError(f"member '{u}' already rated item '{item}'")
    if k < 1:
        raise ValueError("k must be positive")

    candidates: list[tuple[float, str]] = []
    for v in m.members:
        if v == u or (v, item) not in m.ratings:
            continue
        sim = similarity(u, v, m)
        if sim != 0.0:
            candidates.append((sim, v))
    if not candidates:
        return None
    candidates.sort(key=lambda sv: (-sv[0], sv[1]))
    neighbors = candidates[:k]

    own = [m.ratings[(u, i)] for i in m.items_rated_by(u)]
    base = sum(own) / len(own) if own else 0.0
    num = 0.0
    den = 0.0
    for sim, v in neighbors:
        co_rated = [i for i in m.items if (u, i) in m.ratings and (v, i) in m.ratings]
        neighbor_mean = sum(m.ratings[(v, i)] for i in co_rated) / len(co_rated)
        num += sim * (m.ratings[(v, item)] - neighbor_mean)
        den += abs(sim)
    return base + num / den


def _known_or_predicted(u: str, item: str, m: InteractionMatrix, k: int) -> float | None:
    """A member's actual rating when present, otherwise the CF prediction."""
    if u not in m.members or item not in m.items:
        return None
    existing = m.rating(u, item)
    if existing is not None:
        return existing
    return predict_rating(u, item, m, k)


def predict_constraint_order(
    u: str, session: Session, m: InteractionMatrix, k: int = DEFAULT_NEIGHBORS
) -> dict[int, float]:
    """Predicted visit ranks for the constraints the member has not visited.

    Constraints without a usable prediction (member or item missing from the
    matrix, or no informative neighbor) are omitted.
    """
    if m.item_kind is not ItemKind.CONSTRAINT_ORDER:
        raise KindMismatchError("constraint-order prediction needs an order matrix")
    session.require_member(u)
    visited = set(session.visited_constraints.get(u, []))
    out: dict[int, float] = {}
    for constraint in session.model.constraints:
        if constraint.id in visited:
            continue
        value = _known_or_predicted(u, constraint_item(constraint.id), m, k)
        if value is not None:
            out[constraint.id] = value
    return out


def predict_feature_preference(
    u: str, feature: str, m: InteractionMatrix, k: int = DEFAULT_NEIGHBORS
) -> float | None:
    """Inclusion probability from the 0/1 choice matrix, clamped to [0, 1]."""
    if m.item_kind is not ItemKind.FEATURE_CHOICE:
        raise KindMismatchError("feature-preference prediction needs a choice matrix")
    value = _known_or_predicted(u, feature, m, k)
    if value is None:
        return None
    return min(1.0, max(0.0, value))


def recommend_next_constraint(
    session: Session, m: InteractionMatrix | None = None, k: int = DEFAULT_NEIGHBORS
) -> NextConstraintRecommendation | None:
    """Pick the constraint the group should look at next.

    Candidates are constraints some member still has to visit and for which
    every member contributes a value (their own visit rank, their historical
    rating, or a CF prediction). The winner minimizes the mean value; ties
    fall back to higher importance, then the lower ordinal. With no
    candidates the cold-start heuristic picks the most important open
    constraint. Returns None when every member has visited everything
    (or the model has no constraints).
    """
    model = session.model
    if not model.constraints:
        return None
    if m is not None and m.item_kind is not ItemKind.CONSTRAINT_ORDER:
        raise KindMismatchError("next-constraint recommendation needs an order matrix")

    open_constraints = [
        c.id
        for c in model.constraints
        if any(session.visit_rank(member, c.id) is None for member in session.members)
    ]
    if not open_constraints:
        return None

    scores: dict[int, float] = {}
    for cid in open_constraints:
        values: list[float] = []
        for member in session.members:
            rank = session.visit_rank(member, cid)
            if rank is not None:
                values.append(float(rank))
                continue
            value = _known_or_predicted(member, constraint_item(cid), m, k) if m else None
            if value is None:
                break
            values.append(value)
        if len(values) == len(session.members):
            scores[cid] = sum(values) / len(values)

    if scores:
        best = min(scores.values())
        tied = sorted(cid for cid, s in scores.items() if s == best)
        if len(tied) == 1:
            return NextConstraintRecommendation(tied[0], best, TieBreak.NONE)
        top_importance = max(constraint_importance(model, cid) for cid in tied)
        by_importance = [cid for cid in tied if constraint_importance(model, cid) == top_importance]
        if len(by_importance) == 1:
            return NextConstraintRecommendation(by_importance[0], best, TieBreak.IMPORTANCE)
        return NextConstraintRecommendation(min(by_importance), best, TieBreak.LEXICOGRAPHIC)

    # cold start: no usable interaction data
    top_importance = max(constraint_importance(model, cid) for cid in open_constraints)
    winner = min(cid for cid in open_constraints if constraint_importance(model, cid) == top_importance)
    return NextConstraintRecommendation(winner, None, TieBreak.IMPORTANCE)


def aggregate_preferences(
    session: Session,
    strategy: AggregationStrategy = AggregationStrategy.UNANIMITY_MERGE,
    features: list[str] | None = None,
) -> tuple[list[Decision], list[ConflictRecord]]:
    """Turn member positions into group decisions and open conflicts.

    Features on which nobody holds a position are skipped; every other
    feature lands in exactly one of the two outputs. The unanimity merge
    decides only features all position-holders agree on, escalating any
    disagreement to a conflict instead of overruling someone. ``features``
    restricts the pass (used for incremental re-aggregation after a single
    preference edit).
    """
    effective = {member: effective_preferences(session, member) for member in session.members}
    decisions: list[Decision] = []
    conflicts: list[ConflictRecord] = []

    for feature in features if features is not None else session.model.features:
        positions = {
            member: prefs[feature] for member, prefs in effective.items() if prefs[feature].known
        }
        if not positions:
            continue
        values = [p.value for p in positions.values()]
        include = sum(1 for v in values if v is Pref.INCLUDE)
        exclude = len(values) - include

        decision: Pref | None
        if strategy is AggregationStrategy.UNANIMITY_MERGE:
            decision = values[0] if include == 0 or exclude == 0 else None
        elif strategy is AggregationStrategy.MAJORITY:
            decision = None if include == exclude else (
                Pref.INCLUDE if include > exclude else Pref.EXCLUDE
            )
        elif strategy is AggregationStrategy.AVERAGE:
            mean = Fraction(include, len(values))
            decision = None if mean == Fraction(1, 2) else (
                Pref.INCLUDE if mean > Fraction(1, 2) else Pref.EXCLUDE
            )
        elif strategy is AggregationStrategy.LEAST_MISERY:
            decision = Pref.EXCLUDE if exclude else Pref.INCLUDE
        else:  # MOST_PLEASURE
            decision = Pref.INCLUDE if include else Pref.EXCLUDE

        if decision is None:
            conflicts.append(
                ConflictRecord(
                    feature=feature,
                    positions={mb: p.value for mb, p in positions.items()},
                    provenance={mb: p.provenance for mb, p in positions.items()},
                )
            )
        else:
            decisions.append(Decision(feature, decision))

    return decisions, conflicts
