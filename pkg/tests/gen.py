"""Seeded random generators shared by property and acceptance tests."""

from __future__ import annotations

import random

from fmgc.analysis import ModelSat, enumerate_configurations
from fmgc.model import (
    And,
    Decision,
    FeatureModel,
    GroupKind,
    Implies,
    Not,
    Or,
    Pref,
    Relation,
    Var,
)
from fmgc.preferences import InteractionMatrix, ItemKind, Session


def random_model(
    rng: random.Random,
    max_features: int = 12,
    max_constraints: int = 4,
    require_satisfiable: bool = True,
) -> FeatureModel:
    """Random feature tree with groups and a few cross-tree constraints."""
    while True:
        n = rng.randint(2, max_features)
        names = [f"F{i}" for i in range(1, n + 1)]
        model = FeatureModel("rnd", names[0])
        pending = names[1:]
        while pending:
            parent = rng.choice(model.features)
            if len(pending) >= 2 and rng.random() < 0.3:
                size = rng.randint(2, min(3, len(pending)))
                members, pending = pending[:size], pending[size:]
                kind = rng.choice([GroupKind.OR, GroupKind.ALTERNATIVE])
                model.add_group(parent, kind, members)
            else:
                child, pending = pending[0], pending[1:]
                relation = rng.choice([Relation.MANDATORY, Relation.OPTIONAL])
                model.add_child(parent, child, relation)
        for _ in range(rng.randint(0, max_constraints)):
            model.add_constraint(random_expr(rng, model.features))
        if not require_satisfiable:
            return model
        if ModelSat(model).consistent(()):
            return model


def random_expr(rng: random.Random, features: list[str], depth: int = 2):
    if depth == 0 or rng.random() < 0.4:
        return Var(rng.choice(features))
    shape = rng.randrange(4)
    if shape == 0:
        return Not(random_expr(rng, features, depth - 1))
    if shape == 1:
        return And(tuple(random_expr(rng, features, depth - 1) for _ in range(rng.randint(2, 3))))
    if shape == 2:
        return Or(tuple(random_expr(rng, features, depth - 1) for _ in range(rng.randint(2, 3))))
    return Implies(random_expr(rng, features, depth - 1), random_expr(rng, features, depth - 1))


def random_decisions(rng: random.Random, model: FeatureModel, max_count: int | None = None) -> list[Decision]:
    features = list(model.features)
    rng.shuffle(features)
    count = rng.randint(1, max_count or len(features))
    return [
        Decision(f, rng.choice([Pref.INCLUDE, Pref.EXCLUDE])) for f in features[:count]
    ]


def random_inconsistent_decisions(
    rng: random.Random, model: FeatureModel, max_count: int | None = None
) -> list[Decision] | None:
    """Sample until a decision set conflicts with the model; None if unlucky."""
    sat = ModelSat(model)
    for _ in range(60):
        decisions = random_decisions(rng, model, max_count)
        if not sat.consistent(decisions):
            return decisions
    return None


def random_order_matrix(rng: random.Random, members: int = 4, items: int = 6) -> InteractionMatrix:
    member_names = tuple(f"m{i}" for i in range(1, members + 1))
    item_names = tuple(f"c{i}" for i in range(1, items + 1))
    ratings: dict[tuple[str, str], float] = {}
    for member in member_names:
        rated = rng.sample(item_names, rng.randint(2, items))
        ranks = list(range(1, len(rated) + 1))
        rng.shuffle(ranks)
        for item, rank in zip(rated, ranks):
            ratings[(member, item)] = float(rank)
    return InteractionMatrix(ItemKind.CONSTRAINT_ORDER, member_names, item_names, ratings)


def random_choice_matrix(rng: random.Random, members: int = 4, items: int = 6) -> InteractionMatrix:
    member_names = tuple(f"m{i}" for i in range(1, members + 1))
    item_names = tuple(f"f{i}" for i in range(1, items + 1))
    ratings: dict[tuple[str, str], float] = {}
    for member in member_names:
        for item in rng.sample(item_names, rng.randint(1, items)):
            ratings[(member, item)] = float(rng.randint(0, 1))
    return InteractionMatrix(ItemKind.FEATURE_CHOICE, member_names, item_names, ratings)


def random_session(
    rng: random.Random,
    model: FeatureModel | None = None,
    members: int | None = None,
    stated_density: float = 0.7,
    predicted_density: float = 0.5,
) -> Session:
    model = model or random_model(rng, max_features=8, max_constraints=2)
    count = members or rng.randint(2, 4)
    names = [f"u{i}" for i in range(1, count + 1)]
    session = Session(id=f"s{rng.randrange(10**6)}", model=model, members=names)
    for member in names:
        for feature in model.features:
            if rng.random() < stated_density:
                session.stated[member][feature] = rng.choice([Pref.INCLUDE, Pref.EXCLUDE])
            elif rng.random() < predicted_density:
                session.predicted[member][feature] = rng.random()
    return session


def unanimous_consistent_session(rng: random.Random, model: FeatureModel) -> Session | None:
    """Everyone states the same valid configuration in full."""
    configs = enumerate_configurations(model)
    if not configs:
        return None
    config = rng.choice(configs)
    names = [f"u{i}" for i in range(1, rng.randint(2, 4) + 1)]
    session = Session(id=f"s{rng.randrange(10**6)}", model=model, members=names)
    for member in names:
        for feature in model.features:
            session.stated[member][feature] = (
                Pref.INCLUDE if feature in config else Pref.EXCLUDE
            )
    return session
