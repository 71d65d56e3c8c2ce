"""Ranking, rank correlation and op statistics over solution sets.

The proxy objective (summed per-layer loss deltas) is only useful if it
orders architectures the way a real measurement would; kendall_tau is
the statistic used to check that. Measured scores always come from
outside: nothing in here trains or measures anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    SearchInstance,
    Selection,
    cost as core_cost,
    objective as core_objective,
    check_selection,
)
from .solver import SolverConfig, solve_k_diverse
from . import core


class DegenerateRankingError(ValueError):
    """Kendall tau is undefined: one of the lists is entirely tied."""


@dataclass(frozen=True)
class RankedEntry:
    selection: Selection
    proxy_objective: float
    measured: float | None


@dataclass(frozen=True)
class RankedCandidates:
    """Solutions sorted ascending by the active key ('measured' when
    measured scores were supplied, else 'proxy')."""

    entries: tuple[RankedEntry, ...]
    key: str


@dataclass(frozen=True)
class OpHistogram:
    """How often each op_id was selected across all (solution, layer)
    slots; counts always sum to total_slots."""

    counts: dict[str, int]
    total_slots: int


@dataclass(frozen=True)
class CorrelationReport:
    per_budget: tuple[tuple[float, float], ...]
    pooled: float


def rank_candidates(
    instance: SearchInstance,
    solutions: Sequence[Selection],
    measured: Sequence[float] | None = None,
) -> RankedCandidates:
    """Sort candidate selections, best (lowest) first.

    Uses measured scores when given (one per solution), else the proxy
    objective; ties break by cost then lexicographic choices, so the
    output order does not depend on the input order.
    """
    if measured is not None and len(measured) != len(solutions):
        raise ValueError(
            f"{len(measured)} measured scores for {len(solutions)} solutions"
        )
    rows = []
    for idx, sel in enumerate(solutions):
        proxy = core_objective(instance, sel)
        m = float(measured[idx]) if measured is not None else None
        primary = m if m is not None else proxy
        rows.append((primary, core_cost(instance, sel), sel.choices, proxy, m, sel))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return RankedCandidates(
        entries=tuple(RankedEntry(r[5], r[3], r[4]) for r in rows),
        key="measured" if measured is not None else "proxy",
    )


def _merge_count(seq: list[float]) -> int:
    """Count strict inversions with an in-place mergesort."""
    n = len(seq)
    if n < 2:
        return 0
    mid = n // 2
    left, right = seq[:mid], seq[mid:]
    inversions = _merge_count(left) + _merge_count(right)
    i = j = k = 0
    while i < len(left) and j < len(right):
        if right[j] < left[i]:
            inversions += len(left) - i
            seq[k] = right[j]
            j += 1
        else:
            seq[k] = left[i]
            i += 1
        k += 1
    while i < len(left):
        seq[k] = left[i]
        i += 1
        k += 1
    while j < len(right):
        seq[k] = right[j]
        j += 1
        k += 1
    return inversions


def _tied_pairs(sorted_vals: Sequence[float]) -> int:
    total = 0
    run = 1
    for a, b in zip(sorted_vals, sorted_vals[1:]):
        if a == b:
            run += 1
        else:
            total += run * (run - 1) // 2
            run = 1
    total += run * (run - 1) // 2
    return total


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-corrected rank correlation (tau-b) in [-1, 1].

    (concordant - discordant) / sqrt((n0 - t_x) * (n0 - t_y)) with
    n0 = n(n-1)/2 and t the tied-pair counts. All pair counting is done
    in exact integer arithmetic; only the final division is float.
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise ValueError("need at least 2 observations")
    pairs = sorted(zip(x, y))
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    n0 = n * (n - 1) // 2
    t_x = _tied_pairs(xs)
    t_y = _tied_pairs(sorted(ys))
    if t_x == n0 or t_y == n0:
        raise DegenerateRankingError("kendall tau undefined: an input is entirely tied")
    # pairs tied in both x and y
    t_xy = _tied_pairs([(a, b) for a, b in pairs])  # type: ignore[arg-type]
    discordant = _merge_count(ys)
    con_minus_dis = n0 - t_x - t_y + t_xy - 2 * discordant
    return con_minus_dis / math.sqrt((n0 - t_x) * (n0 - t_y))


def selection_histogram(
    instance: SearchInstance, solutions: Sequence[Selection]
) -> OpHistogram:
    """Count selected op_ids over every (solution, layer) slot."""
    counts: dict[str, int] = {}
    for sel in solutions:
        check_selection(instance, sel)
        for layer, c in zip(instance.layers, sel.choices):
            op_id = layer.ops[c].op_id
            counts[op_id] = counts.get(op_id, 0) + 1
    return OpHistogram(
        counts=dict(sorted(counts.items())),
        total_slots=len(solutions) * instance.num_layers,
    )


def proxy_correlation_report(
    instance: SearchInstance,
    ratios: Sequence[float],
    measured: Sequence[Sequence[float]],
    selections: Sequence[Sequence[Selection]] | None = None,
    overlap_fraction: float = 0.7,
    config: SolverConfig | None = None,
) -> CorrelationReport:
    """Per-budget and pooled tau between proxy objective and measured
    scores.

    When selections is None, each budget's architectures are produced by
    the diverse solve loop (k = number of measured scores supplied for
    that budget); otherwise the given selections are paired positionally
    with the measured scores. Needs at least 2 architectures per budget.
    """
    if len(measured) != len(ratios):
        raise ValueError(f"{len(measured)} measured groups for {len(ratios)} ratios")
    if selections is not None and len(selections) != len(ratios):
        raise ValueError(f"{len(selections)} selection groups for {len(ratios)} ratios")
    per_budget: list[tuple[float, float]] = []
    pooled_proxy: list[float] = []
    pooled_measured: list[float] = []
    for bi, ratio in enumerate(ratios):
        scores = [float(v) for v in measured[bi]]
        if len(scores) < 2:
            raise ValueError(f"ratio {ratio}: need >= 2 architectures, got {len(scores)}")
        if selections is None:
            budget = core.budget_from_ratio(instance, ratio)
            report = solve_k_diverse(
                instance, budget, k=len(scores),
                overlap_fraction=overlap_fraction, config=config,
            )
            sels = [r.selection for r in report.results if r.selection is not None]
            if len(sels) != len(scores):
                raise ValueError(
                    f"ratio {ratio}: found {len(sels)} architectures for "
                    f"{len(scores)} measured scores"
                )
        else:
            sels = list(selections[bi])
            if len(sels) != len(scores):
                raise ValueError(
                    f"ratio {ratio}: {len(sels)} selections for {len(scores)} measured scores"
                )
        proxies = [core_objective(instance, s) for s in sels]
        per_budget.append((float(ratio), kendall_tau(proxies, scores)))
        pooled_proxy.extend(proxies)
        pooled_measured.extend(scores)
    return CorrelationReport(
        per_budget=tuple(per_budget),
        pooled=kendall_tau(pooled_proxy, pooled_measured),
    )
