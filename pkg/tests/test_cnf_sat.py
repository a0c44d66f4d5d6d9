import random

import pytest

from fmgc.analysis import enumerate_configurations, is_consistent
from fmgc.cnf import CnfFormula, to_cnf
from fmgc.errors import ModelTooLargeError, UnknownVariableError
from fmgc.model import Decision, FeatureModel, Pref, Relation, parse_model
from fmgc.sat import all_feature_solutions, solve

from gen import random_decisions, random_model

PHONE_CONFIGS = [
    frozenset({"Phone", "Screen", "Basic"}),
    frozenset({"Phone", "Screen", "GPS", "HD"}),
    frozenset({"Phone", "Screen", "HD"}),
]


def inc(f):
    return Decision(f, Pref.INCLUDE)


def exc(f):
    return Decision(f, Pref.EXCLUDE)


# -- to_cnf -------------------------------------------------------------------


def test_single_feature_model_has_one_clause():
    cnf = to_cnf(parse_model("model m\nroot A"))
    assert cnf.clauses == [[1]]
    assert cnf.feature_count == 1


def test_optional_child_clause_present(phone_model):
    cnf = to_cnf(phone_model)
    gps, phone = cnf.lit("GPS"), cnf.lit("Phone")
    assert sorted([-gps, phone]) in [sorted(c) for c in cnf.clauses]


def test_aux_variables_flagged_non_feature(phone_model):
    cnf = to_cnf(phone_model)
    assert cnf.feature_count == 5
    assert len(cnf.names) > 5  # the cross-tree constraint introduced auxiliaries
    assert all(name.startswith("_t") for name in cnf.names[5:])


def test_phone_cnf_solutions_match_enumeration(phone_model):
    assert all_feature_solutions(to_cnf(phone_model)) == PHONE_CONFIGS


# -- solve ---------------------------------------------------------------------


def test_empty_formula_is_sat():
    assert solve(CnfFormula()) == {}


def test_contradictory_units_unsat():
    cnf = CnfFormula()
    cnf.add_variable("x", feature=True)
    cnf.add_clause([1])
    cnf.add_clause([-1])
    assert solve(cnf) is None


def test_phone_basic_gps_assumptions_unsat(phone_model):
    cnf = to_cnf(phone_model)
    assert solve(cnf, [cnf.lit("Basic"), cnf.lit("GPS")]) is None
    assert solve(cnf, [cnf.lit("HD"), cnf.lit("GPS")]) is not None


def test_unknown_assumption_rejected(phone_model):
    cnf = to_cnf(phone_model)
    with pytest.raises(UnknownVariableError):
        solve(cnf, [len(cnf.names) + 1])


def test_solve_deterministic(phone_model):
    cnf = to_cnf(phone_model)
    first = solve(cnf)
    for _ in range(5):
        assert solve(cnf) == first


def brute_force_sat(cnf: CnfFormula, assumptions=()) -> bool:
    n = len(cnf.names)
    fixed = {abs(a): a > 0 for a in assumptions}
    for mask in range(2**n):
        values = {v: bool(mask >> (v - 1) & 1) for v in range(1, n + 1)}
        if any(values[v] != want for v, want in fixed.items()):
            continue
        if all(any(values[abs(l)] == (l > 0) for l in clause) for clause in cnf.clauses):
            return True
    return False


def test_solve_agrees_with_truth_table_on_random_formulas():
    rng = random.Random(99)
    for _ in range(120):
        n = rng.randint(1, 6)
        cnf = CnfFormula()
        for i in range(n):
            cnf.add_variable(f"v{i}", feature=True)
        for _ in range(rng.randint(1, 10)):
            width = rng.randint(1, 3)
            variables = rng.sample(range(1, n + 1), min(width, n))
            cnf.add_clause([v if rng.random() < 0.5 else -v for v in variables])
        assumptions = [
            v if rng.random() < 0.5 else -v
            for v in rng.sample(range(1, n + 1), rng.randint(0, n))
        ]
        got = solve(cnf, assumptions)
        assert (got is not None) == brute_force_sat(cnf, assumptions)
        if got is not None:
            values = {name: got[name] for name in cnf.names}
            assert all(
                any(values[cnf.names[abs(l) - 1]] == (l > 0) for l in clause)
                for clause in cnf.clauses
            )
            assert all(got[cnf.names[abs(a) - 1]] == (a > 0) for a in assumptions)


# -- is_consistent ---------------------------------------------------------------


def test_is_consistent_phone_cases(phone_model):
    assert is_consistent(phone_model, ())
    assert not is_consistent(phone_model, [inc("Basic"), inc("GPS")])
    assert is_consistent(phone_model, [inc("HD"), inc("GPS")])


def test_inconsistency_is_monotone():
    rng = random.Random(5)
    checked = 0
    while checked < 40:
        model = random_model(rng, max_features=8, max_constraints=3)
        decisions = random_decisions(rng, model)
        if is_consistent(model, decisions):
            continue
        remaining = [f for f in model.features if f not in {d.feature for d in decisions}]
        extra = [
            Decision(f, rng.choice([Pref.INCLUDE, Pref.EXCLUDE])) for f in remaining[:2]
        ]
        assert not is_consistent(model, decisions + extra)
        checked += 1


# -- enumerate_configurations ------------------------------------------------------


def test_enumerate_single_feature():
    assert enumerate_configurations(parse_model("model m\nroot A")) == [frozenset({"A"})]


def test_enumerate_phone(phone_model):
    assert enumerate_configurations(phone_model) == PHONE_CONFIGS


def test_enumerate_truncates(phone_model):
    assert enumerate_configurations(phone_model, limit=1) == PHONE_CONFIGS[:1]


def test_enumerate_guards_size():
    model = FeatureModel("big", "R")
    for i in range(25):
        model.add_child("R", f"F{i}", Relation.OPTIONAL)
    with pytest.raises(ModelTooLargeError):
        enumerate_configurations(model)


def test_cnf_and_semantic_enumeration_agree_on_random_models():
    rng = random.Random(7)
    for _ in range(60):
        model = random_model(rng, max_features=9, max_constraints=4, require_satisfiable=False)
        assert all_feature_solutions(to_cnf(model)) == enumerate_configurations(model)
