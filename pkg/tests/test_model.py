import random

import pytest

from fmgc.errors import ModelParseError, UnknownConstraintError
from fmgc.model import (
    And,
    GroupKind,
    Implies,
    Not,
    Or,
    Relation,
    Var,
    constraint_importance,
    expr_text,
    parse_expr,
    parse_model,
    serialize_model,
)

from gen import random_model


def test_minimal_model():
    model = parse_model("model m\nroot A")
    assert model.name == "m"
    assert model.features == ["A"]
    assert model.constraints == []


def test_phone_model_structure(phone_model):
    m = phone_model
    assert m.name == "phone"
    assert m.features == ["Phone", "Screen", "GPS", "Basic", "HD"]
    assert m.children["Phone"] == [("Screen", Relation.MANDATORY), ("GPS", Relation.OPTIONAL)]
    assert len(m.groups) == 1
    group = m.groups[0]
    assert (group.parent, group.kind, group.members) == ("Screen", GroupKind.ALTERNATIVE, ("Basic", "HD"))
    assert len(m.constraints) == 1
    assert m.constraints[0].expr == Not(And((Var("Basic"), Var("GPS"))))


def test_self_child_is_rejected():
    with pytest.raises(ModelParseError, match="own child"):
        parse_model("model m\nroot A\noptional A A")


def test_duplicate_feature_rejected():
    with pytest.raises(ModelParseError, match="duplicate feature"):
        parse_model("model m\nroot A\noptional A B\noptional A B")


def test_unknown_parent_rejected():
    with pytest.raises(ModelParseError, match="unknown parent"):
        parse_model("model m\nroot A\noptional Z B")


def test_feature_in_two_groups_rejected():
    text = "model m\nroot A\nor A B C\nalt A B D"
    with pytest.raises(ModelParseError, match="already belongs to a group"):
        parse_model(text)


def test_missing_root():
    with pytest.raises(ModelParseError, match="missing 'root'"):
        parse_model("model m\n# nothing else")


def test_model_directive_must_come_first():
    with pytest.raises(ModelParseError, match="line 1"):
        parse_model("root A\nmodel m")


def test_unknown_constraint_feature():
    with pytest.raises(ModelParseError, match="unknown feature 'Z'"):
        parse_model("model m\nroot A\nconstraint (not Z)")


def test_syntax_error_carries_line_number():
    with pytest.raises(ModelParseError, match="line 3"):
        parse_model("model m\nroot A\nfrobnicate A B")


def test_comments_and_blank_lines_ignored(phone_text):
    noisy = "\n# header\n" + phone_text.replace("\n", "  # trailing\n\n", 1)
    assert parse_model(noisy) == parse_model(phone_text)


def test_expr_parsing_round_trip():
    text = "(implies (or A B) (not (and A C)))"
    expr = parse_expr(text)
    assert expr == Implies(Or((Var("A"), Var("B"))), Not(And((Var("A"), Var("C")))))
    assert expr_text(expr) == text


@pytest.mark.parametrize(
    "bad",
    ["", "(not A B)", "(and A)", "(implies A)", "(xor A B)", "(and A B", "A)", "(not 5x)"],
)
def test_expr_parse_errors(bad):
    with pytest.raises(ModelParseError):
        parse_expr(bad)


def test_serialize_round_trips_phone(phone_model, phone_text):
    assert serialize_model(phone_model) == phone_text
    assert parse_model(serialize_model(phone_model)) == phone_model


def test_serialize_round_trips_random_models():
    rng = random.Random(42)
    for _ in range(60):
        model = random_model(rng, require_satisfiable=False)
        assert parse_model(serialize_model(model)) == model


def test_importance_counts_distinct_features(phone_model):
    # ¬(Basic ∧ GPS) touches two features
    assert constraint_importance(phone_model, 1) == 2

    model = parse_model(
        "model m\nroot A\noptional A B\noptional A C\n"
        "constraint A\nconstraint (implies A (or A B C))"
    )
    assert constraint_importance(model, 1) == 1
    assert constraint_importance(model, 2) == 3  # repeats of A ignored


def test_importance_unknown_id(phone_model):
    with pytest.raises(UnknownConstraintError):
        constraint_importance(phone_model, 2)
