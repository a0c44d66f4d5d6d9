"""Translation of feature models to CNF.

Feature variables come first in declaration order; Tseitin auxiliaries for
cross-tree constraints are appended after them and flagged as non-features
so solutions can be projected back onto the feature space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownVariableError
from .model import And, Expr, FeatureModel, Implies, Not, Or, Var


@dataclass
class CnfFormula:
    names: list[str] = field(default_factory=list)
    feature_count: int = 0
    clauses: list[list[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._index = {name: i + 1 for i, name in enumerate(self.names)}

    @property
    def feature_names(self) -> list[str]:
        return self.names[: self.feature_count]

    def add_variable(self, name: str, *, feature: bool = False) -> int:
        if name in self._index:
            raise ValueError(f"duplicate variable '{name}'")
        if feature and len(self.names) != self.feature_count:
            raise ValueError("feature variables must precede auxiliaries")
        self.names.append(name)
        self._index[name] = len(self.names)
        if feature:
            self.feature_count += 1
        return len(self.names)

    def lit(self, name: str, positive: bool = True) -> int:
        try:
            var = self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable '{name}'") from None
        return var if positive else -var

    def add_clause(self, lits: list[int]) -> None:
        """Add a clause, deduplicated; tautologies are dropped."""
        seen: dict[int, None] = {}
        for lit in lits:
            if not lit or abs(lit) > len(self.names):
                raise ValueError(f"literal {lit} out of range")
            if -lit in seen:
                return  # clause is trivially true
            seen[lit] = None
        if not seen:
            raise ValueError("empty clause")
        self.clauses.append(list(seen))

    def project_features(self, assignment: dict[str, bool]) -> frozenset[str]:
        return frozenset(n for n in self.feature_names if assignment[n])


def to_cnf(model: FeatureModel) -> CnfFormula:
    """Standard feature-tree semantics plus Tseitin-encoded constraints."""
    cnf = CnfFormula()
    for feature in model.features:
        cnf.add_variable(feature, feature=True)

    cnf.add_clause([cnf.lit(model.root)])

    for parent, links in model.children.items():
        p = cnf.lit(parent)
        for child, relation in links:
            c = cnf.lit(child)
            cnf.add_clause([-c, p])
            if relation.value == "mandatory":
                cnf.add_clause([-p, c])

    for group in model.groups:
        p = cnf.lit(group.parent)
        member_lits = [cnf.lit(m) for m in group.members]
        for m in member_lits:
            cnf.add_clause([-m, p])
        cnf.add_clause([-p] + member_lits)
        if group.kind.value == "alt":
            for i in range(len(member_lits)):
                for j in range(i + 1, len(member_lits)):
                    cnf.add_clause([-member_lits[i], -member_lits[j]])

    counter = [0]
    for constraint in model.constraints:
        root_lit = _tseitin(cnf, constraint.expr, counter)
        cnf.add_clause([root_lit])
    return cnf


def _tseitin(cnf: CnfFormula, expr: Expr, counter: list[int]) -> int:
    """Return a literal equisatisfiably equivalent to ``expr``.

    Atoms map to their feature literal, negation to literal negation;
    every other node gets a fresh auxiliary variable constrained to be
    biconditional with its children.
    """
    if isinstance(expr, Var):
        return cnf.lit(expr.name)
    if isinstance(expr, Not):
        return -_tseitin(cnf, expr.arg, counter)

    counter[0] += 1
    t = cnf.add_variable(f"_t{counter[0]}")

    if isinstance(expr, And):
        args = [_tseitin(cnf, a, counter) for a in expr.args]
        for a in args:
            cnf.add_clause([-t, a])
        cnf.add_clause([t] + [-a for a in args])
    elif isinstance(expr, Or):
        args = [_tseitin(cnf, a, counter) for a in expr.args]
        for a in args:
            cnf.add_clause([-a, t])
        cnf.add_clause([-t] + args)
    elif isinstance(expr, Implies):
        lhs = _tseitin(cnf, expr.lhs, counter)
        rhs = _tseitin(cnf, expr.rhs, counter)
        cnf.add_clause([-t, -lhs, rhs])
        cnf.add_clause([lhs, t])
        cnf.add_clause([-rhs, t])
    else:  # pragma: no cover - exhaustive over Expr
        raise TypeError(f"unsupported expression node {expr!r}")
    return t
