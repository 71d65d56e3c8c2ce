"""Seeded synthetic instances for experiments and tests.

Costs are snapped to a 0.001 ms grid so the solver's default
micro-unit scaling is exact and feasibility at the budget boundary is
never a float question.
"""

from __future__ import annotations

import random

from .core import CandidateOp, LayerTable, SearchInstance

_FAMILIES = ("efn", "conv", "vit")


def uniform_instance(
    seed: int,
    n: int,
    m: int,
    negative: bool = False,
    tagged: bool = False,
) -> SearchInstance:
    """Independent uniform costs and deltas; teacher at a random slot."""
    rng = random.Random(seed)
    layers = []
    for i in range(n):
        teacher_idx = rng.randrange(m)
        ops = []
        for j in range(m):
            op_cost = round(rng.uniform(0.05, 2.0), 3)
            tags = (_FAMILIES[j % len(_FAMILIES)],) if tagged else ()
            if j == teacher_idx:
                ops.append(CandidateOp("teacher", 0.0, op_cost))
            else:
                lo = -0.5 if negative else 0.0
                ops.append(CandidateOp(f"op{j}", rng.uniform(lo, 1.0), op_cost, tags))
        layers.append(LayerTable(i, tuple(ops), teacher_idx))
    return SearchInstance(f"uniform-n{n}-m{m}-s{seed}", tuple(layers))


def tradeoff_instance(seed: int, n: int, m: int) -> SearchInstance:
    """Realistically shaped tables: an expensive zero-delta teacher, a
    near-free identity that hurts more at depth, and candidates whose
    loss delta shrinks as their cost grows (plus noise)."""
    if m < 3:
        raise ValueError("tradeoff_instance needs m >= 3 (teacher, identity, candidates)")
    rng = random.Random(seed)
    layers = []
    for i in range(n):
        t_cost = round(rng.uniform(0.8, 1.6), 3)
        depth = (i + 1) / n
        ops = [
            CandidateOp("teacher", 0.0, t_cost),
            CandidateOp("identity", rng.uniform(0.2, 0.8) * (0.4 + depth), 0.01),
        ]
        for j in range(m - 2):
            frac = rng.uniform(0.05, 0.95)
            delta = max(0.0, (1.0 - frac) * rng.uniform(0.3, 0.7) + rng.gauss(0.0, 0.02))
            ops.append(
                CandidateOp(
                    f"op{j}",
                    delta,
                    round(t_cost * frac, 3),
                    (_FAMILIES[j % len(_FAMILIES)],),
                )
            )
        layers.append(LayerTable(i, tuple(ops), 0))
    return SearchInstance(f"tradeoff-n{n}-m{m}-s{seed}", tuple(layers))


def zero_shot_instance(seed: int, n: int, identity_id: str = "identity") -> SearchInstance:
    """Teacher plus a skip connection per layer, nothing else."""
    rng = random.Random(seed)
    layers = []
    for i in range(n):
        ops = (
            CandidateOp("teacher", 0.0, round(rng.uniform(0.5, 1.5), 3)),
            CandidateOp(identity_id, rng.uniform(0.05, 1.0), 0.01),
        )
        layers.append(LayerTable(i, ops, 0))
    return SearchInstance(f"zeroshot-n{n}-s{seed}", tuple(layers))
