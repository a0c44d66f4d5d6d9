"""Standalone direct evaluation of the rating-prediction formula.

Kept deliberately independent of fmgc.grouprec: ratings are plain nested
dicts and every quantity is spelled out longhand, so the production code
can be checked against it rather than against itself.
"""

from __future__ import annotations

import math


def to_nested(ratings: dict[tuple[str, str], float]) -> dict[str, dict[str, float]]:
    nested: dict[str, dict[str, float]] = {}
    for (member, item), value in ratings.items():
        nested.setdefault(member, {})[item] = value
    return nested


def oracle_similarity(u: str, v: str, by_member: dict[str, dict[str, float]]) -> float:
    common = sorted(set(by_member.get(u, {})) & set(by_member.get(v, {})))
    if len(common) < 2:
        return 0.0
    a = [by_member[u][i] for i in common]
    b = [by_member[v][i] for i in common]
    ma = sum(a) / len(a)
    mb = sum(b) / len(b)
    num = 0.0
    da = 0.0
    db = 0.0
    for x, y in zip(a, b):
        num += (x - ma) * (y - mb)
        da += (x - ma) ** 2
        db += (y - mb) ** 2
    if da == 0.0 or db == 0.0:
        return 0.0
    return num / (math.sqrt(da) * math.sqrt(db))


def oracle_predict(
    u: str,
    item: str,
    ratings: dict[tuple[str, str], float],
    k: int,
    members_in_order: list[str],
) -> float | None:
    by_member = to_nested(ratings)
    sims = []
    for v in members_in_order:
        if v == u or item not in by_member.get(v, {}):
            continue
        s = oracle_similarity(u, v, by_member)
        if s != 0.0:
            sims.append((s, v))
    if not sims:
        return None
    sims.sort(key=lambda sv: (-sv[0], sv[1]))
    chosen = sims[:k]

    own = by_member.get(u, {})
    base = sum(own.values()) / len(own) if own else 0.0
    numerator = 0.0
    denominator = 0.0
    for s, v in chosen:
        common = set(own) & set(by_member[v])
        neighbor_mean = sum(by_member[v][i] for i in common) / len(common)
        numerator += s * (by_member[v][item] - neighbor_mean)
        denominator += abs(s)
    return base + numerator / denominator


def oracle_loo_mae(
    ratings: dict[tuple[str, str], float], k: int, members_in_order: list[str]
) -> tuple[float, float]:
    """(mae, coverage) recomputed cell by cell."""
    errors = []
    total = 0
    for (member, item), truth in sorted(ratings.items()):
        total += 1
        held_out = {cell: r for cell, r in ratings.items() if cell != (member, item)}
        prediction = oracle_predict(member, item, held_out, k, members_in_order)
        if prediction is not None:
            errors.append(abs(prediction - truth))
    mae = sum(errors) / len(errors) if errors else 0.0
    coverage = len(errors) / total if total else 0.0
    return mae, coverage
