"""Consistency queries and the brute-force configuration enumerator.

``enumerate_configurations`` deliberately avoids the CNF/SAT route: it
checks the tree and constraint semantics directly per assignment, so the
two reasoning paths can be compared against each other in tests.
"""

from __future__ import annotations

from collections.abc import Iterable

from .cnf import CnfFormula, to_cnf
from .errors import ModelTooLargeError
from .model import Decision, FeatureModel, Pref, expr_eval
from .sat import solve

ENUMERATION_FEATURE_LIMIT = 24


def decision_assumptions(cnf: CnfFormula, decisions: Iterable[Decision]) -> list[int]:
    return [cnf.lit(d.feature, d.value is Pref.INCLUDE) for d in decisions]


class ModelSat:
    """Consistency oracle with the model CNF computed once."""

    def __init__(self, model: FeatureModel):
        self.model = model
        self.cnf = to_cnf(model)

    def consistent(self, decisions: Iterable[Decision]) -> bool:
        for d in decisions:
            self.model.require_feature(d.feature)
        return solve(self.cnf, decision_assumptions(self.cnf, decisions)) is not None


def is_consistent(model: FeatureModel, decisions: Iterable[Decision]) -> bool:
    """True iff the model admits a configuration honoring every decision."""
    return ModelSat(model).consistent(decisions)


def enumerate_configurations(model: FeatureModel, limit: int | None = None) -> list[frozenset[str]]:
    """All valid configurations as feature sets, by direct semantic check.

    Ordered lexicographically by sorted feature names, truncated at
    ``limit``. Guarded to ≤ 24 features.
    """
    if len(model.features) > ENUMERATION_FEATURE_LIMIT:
        raise ModelTooLargeError(
            f"model has {len(model.features)} features; enumeration is capped at "
            f"{ENUMERATION_FEATURE_LIMIT}"
        )
    if limit is not None and limit < 1:
        raise ValueError("limit must be positive")

    features = model.features  # declaration order: parents precede children
    configs: list[frozenset[str]] = []
    assignment: dict[str, bool] = {}

    def recurse(i: int) -> None:
        if i == len(features):
            if _satisfies_model(model, assignment):
                configs.append(frozenset(f for f, v in assignment.items() if v))
            return
        feature = features[i]
        parent = model.parent_of(feature)
        for val in (False, True):
            if val and parent is not None and not assignment[parent]:
                continue  # child without parent can never satisfy the tree
            assignment[feature] = val
            recurse(i + 1)
        del assignment[feature]

    recurse(0)
    configs.sort(key=lambda s: sorted(s))
    return configs if limit is None else configs[:limit]


def _satisfies_model(model: FeatureModel, assignment: dict[str, bool]) -> bool:
    if not assignment[model.root]:
        return False
    for parent, links in model.children.items():
        for child, relation in links:
            if assignment[child] and not assignment[parent]:
                return False
            if relation.value == "mandatory" and assignment[parent] and not assignment[child]:
                return False
    for group in model.groups:
        chosen = sum(1 for m in group.members if assignment[m])
        if any(assignment[m] and not assignment[group.parent] for m in group.members):
            return False
        if assignment[group.parent]:
            if group.kind.value == "alt":
                if chosen != 1:
                    return False
            elif chosen < 1:
                return False
        elif chosen:
            return False
    return all(expr_eval(c.expr, assignment) for c in model.constraints)
