"""Small complete SAT solver used for all consistency reasoning.

DPLL with unit propagation and chronological backtracking over a trail.
Branching is deterministic: lowest-index unassigned variable first
(declaration order), positive phase before negative, so identical inputs
always produce identical verdicts and assignments.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

from .cnf import CnfFormula
from .errors import UnknownVariableError


def solve(cnf: CnfFormula, assumptions: Iterable[int] = ()) -> dict[str, bool] | None:
    """Return a full satisfying assignment (name -> bool), or None if unsat."""
    return _solve(len(cnf.names), cnf.clauses, list(assumptions), cnf.names)


def _solve(
    num_vars: int,
    clauses: list[list[int]],
    assumptions: list[int],
    names: list[str],
) -> dict[str, bool] | None:
    for lit in assumptions:
        if not 1 <= abs(lit) <= num_vars:
            raise UnknownVariableError(f"assumption literal {lit} out of range")

    value: list[bool | None] = [None] * (num_vars + 1)
    trail: list[int] = []
    # decision stack: (variable, trail length before the decision, flipped?)
    decisions: list[tuple[int, int, bool]] = []

    # occurrence lists: literal -> clauses containing it
    occurs: dict[int, list[list[int]]] = {}
    for clause in clauses:
        for lit in clause:
            occurs.setdefault(lit, []).append(clause)

    def assign(lit: int) -> bool:
        var = abs(lit)
        want = lit > 0
        current = value[var]
        if current is not None:
            return current == want
        value[var] = want
        trail.append(lit)
        return True

    def propagate(start: int) -> bool:
        """Unit-propagate from trail position ``start``; False on conflict."""
        i = start
        while i < len(trail):
            falsified = -trail[i]
            for clause in occurs.get(falsified, ()):
                unassigned: int | None = None
                satisfied = False
                for lit in clause:
                    v = value[abs(lit)]
                    if v is None:
                        if unassigned is None:
                            unassigned = lit
                        else:
                            unassigned = 0  # two unassigned: not unit
                            break
                    elif v == (lit > 0):
                        satisfied = True
                        break
                if satisfied or unassigned == 0:
                    continue
                if unassigned is None:
                    return False  # all literals false
                if not assign(unassigned):
                    return False
            i += 1
        return True

    def backtrack() -> bool:
        """Undo to the most recent unflipped decision and flip it."""
        while decisions:
            var, mark, flipped = decisions.pop()
            while len(trail) > mark:
                value[abs(trail.pop())] = None
            if not flipped:
                decisions.append((var, mark, True))
                assign(-var)  # positive phase was tried first
                return True
        return False

    for lit in assumptions:
        if not assign(lit):
            return None
    for clause in clauses:
        if len(clause) == 1 and not assign(clause[0]):
            return None
    if not propagate(0):
        return None

    while True:
        var = next((v for v in range(1, num_vars + 1) if value[v] is None), None)
        if var is None:
            return {names[v - 1]: bool(value[v]) for v in range(1, num_vars + 1)}
        mark = len(trail)
        decisions.append((var, mark, False))
        assign(var)
        while not propagate(mark):
            if not backtrack():
                return None
            mark = decisions[-1][1]


def iter_feature_solutions(
    cnf: CnfFormula, assumptions: Iterable[int] = ()
) -> Iterator[frozenset[str]]:
    """Enumerate all solutions projected onto the feature variables.

    Uses blocking clauses over the feature literals, so each projected
    solution is yielded exactly once.
    """
    clauses = [list(c) for c in cnf.clauses]
    feature_vars = list(range(1, cnf.feature_count + 1))
    assumptions = list(assumptions)
    while True:
        assignment = _solve(len(cnf.names), clauses, assumptions, cnf.names)
        if assignment is None:
            return
        yield cnf.project_features(assignment)
        block = [-v if assignment[cnf.names[v - 1]] else v for v in feature_vars]
        if not block:
            return
        clauses.append(block)


def all_feature_solutions(cnf: CnfFormula) -> list[frozenset[str]]:
    """All projected solutions, ordered lexicographically by sorted names."""
    return sorted(iter_feature_solutions(cnf), key=lambda s: sorted(s))
