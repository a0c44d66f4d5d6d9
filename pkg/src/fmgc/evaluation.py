"""Leave-one-out evaluation of the collaborative-filtering predictor.

Each rated cell is hidden in turn and re-predicted from the rest; MAE is
averaged over the predictable cells and coverage is their share of all
held-out cells. For visit-order matrices, precision@1 additionally checks
whether hiding a member's first-visited constraint and asking for a single
recommendation names exactly that constraint. Iteration orders and tie
breaks are by name, so the metrics do not depend on declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MatrixFormatError
from .grouprec import DEFAULT_NEIGHBORS, predict_rating
from .preferences import InteractionMatrix, ItemKind


@dataclass(frozen=True)
class EvalResult:
    mae: float
    coverage: float
    precision_at_1: float | None  # None for choice matrices

    def as_dict(self) -> dict:
        return {"mae": self.mae, "coverage": self.coverage, "precision_at_1": self.precision_at_1}


def eval_loo(matrix: InteractionMatrix, k: int = DEFAULT_NEIGHBORS) -> EvalResult:
    if len(matrix.members) < 2:
        raise MatrixFormatError("leave-one-out evaluation needs at least 2 members")

    cells = sorted(matrix.ratings)
    errors: list[float] = []
    for member, item in cells:
        truth = matrix.ratings[(member, item)]
        prediction = predict_rating(member, item, matrix.without(member, item), k)
        if prediction is not None:
            errors.append(abs(prediction - truth))

    mae = sum(errors) / len(errors) if errors else 0.0
    coverage = len(errors) / len(cells) if cells else 0.0

    precision: float | None = None
    if matrix.item_kind is ItemKind.CONSTRAINT_ORDER:
        hits: list[int] = []
        for member in sorted(matrix.members):
            rated = matrix.items_rated_by(member)
            if len(rated) < 2:
                continue
            first = min(rated, key=lambda i: (matrix.ratings[(member, i)], i))
            held_out = matrix.without(member, first)
            recommended = _recommend_for_member(member, held_out, k)
            hits.append(1 if recommended == first else 0)
        precision = sum(hits) / len(hits) if hits else 0.0

    return EvalResult(mae, coverage, precision)


def _recommend_for_member(member: str, matrix: InteractionMatrix, k: int) -> str | None:
    """Single-member next-item pick: lowest predicted rank, names break ties."""
    best: tuple[float, str] | None = None
    for item in sorted(matrix.items):
        if (member, item) in matrix.ratings:
            continue
        prediction = predict_rating(member, item, matrix, k)
        if prediction is None:
            continue
        if best is None or (prediction, item) < best:
            best = (prediction, item)
    return best[1] if best else None
