"""Exact search for budget-constrained layer replacements.

Minimises the summed per-layer loss deltas subject to a latency budget,
one op per layer, and an overlap cap against each previously returned
selection.  The search is branch-and-bound specialised to the
multiple-choice knapsack structure:

* costs are scaled to integers (half-even) and the budget is rounded
  down after scaling, so feasibility at the boundary is unambiguous;
* the lower bound is the LP relaxation of the residual problem, solved
  greedily on each free layer's convex-hull frontier, with overlap
  constraints dropped (dropping constraints only lowers the bound);
* overlap constraints are enforced exactly during the integer search.

Ties between equal-objective optima are broken by lower (scaled) cost,
then lexicographically smallest choice vector, which makes results
reproducible and independent of worker count for solves that run to
completion.
"""

from __future__ import annotations

import heapq
import math
import threading
import time
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import (
    Budget,
    CandidateOp,
    LayerTable,
    SearchInstance,
    Selection,
    check_selection,
    cost as core_cost,
    objective as core_objective,
    validate_instance,
)
from .lut_io import InstanceValidationError

STATUS_OPTIMAL = "optimal"
STATUS_FEASIBLE = "feasible"
STATUS_INFEASIBLE = "infeasible"
STATUS_TIMEOUT = "timeout"

# guards against float noise just below an integer boundary
_BUDGET_EPS = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    """Search limits and the cost quantisation.

    cost_scale is the number of integer cost units per millisecond
    (default: micro-units). gap_tolerance is absolute in objective
    units; 0 means prove optimality. threads > 1 explores nodes on a
    worker pool; results of completed solves do not depend on it.
    """

    time_limit_s: float = 60.0
    cost_scale: int = 1000
    gap_tolerance: float = 0.0
    node_limit: int | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if not self.time_limit_s > 0:
            raise ValueError("time_limit_s must be > 0")
        if self.cost_scale < 1:
            raise ValueError("cost_scale must be >= 1")
        if self.gap_tolerance < 0:
            raise ValueError("gap_tolerance must be >= 0")
        if self.node_limit is not None and self.node_limit < 1:
            raise ValueError("node_limit must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass(frozen=True)
class SolveResult:
    """One solution with its certificate.

    gap = incumbent objective minus best remaining lower bound; exactly
    0 when status is optimal. nodes_explored counts branch-and-bound
    expansions and may vary with thread count even though the returned
    selection does not.
    """

    selection: Selection | None
    objective: float | None
    cost_ms: float | None
    status: str
    gap: float
    nodes_explored: int


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a k-diverse solve loop, in the order found."""

    instance_name: str
    budget_ms: float
    overlap_limit: int
    results: tuple[SolveResult, ...]
    wall_time_s: float

    def solution_rows(self) -> list[dict]:
        rows = []
        for res in self.results:
            if res.status not in (STATUS_OPTIMAL, STATUS_FEASIBLE):
                continue
            rows.append(
                {
                    "choices": list(res.selection.choices),
                    "objective": res.objective,
                    "cost_ms": res.cost_ms,
                    "status": res.status,
                    "gap": res.gap,
                }
            )
        return rows


def _pareto_indices(costs: Sequence[float], deltas: Sequence[float]) -> list[int]:
    """Indices not dominated on (cost, delta), cost ascending, delta
    strictly decreasing. Exact duplicates keep the lowest index."""
    order = sorted(range(len(costs)), key=lambda j: (costs[j], deltas[j], j))
    kept: list[int] = []
    best = math.inf
    for j in order:
        if deltas[j] < best:
            kept.append(j)
            best = deltas[j]
    return kept


def dominance_frontier(layer: LayerTable) -> list[CandidateOp]:
    """Ops that matter for bounding a layer.

    An op is dropped when another op has cost <= and score_delta <= with
    at least one strict. Used only inside the relaxation; dominated ops
    stay selectable in the integer search because overlap constraints
    can force them.
    """
    costs = [op.cost for op in layer.ops]
    deltas = [op.score_delta for op in layer.ops]
    return [layer.ops[j] for j in _pareto_indices(costs, deltas)]


def _convex_hull(points: list[tuple[int, float, int]]) -> list[tuple[int, float, int]]:
    """Lower convex hull of pareto points (cost, delta, op) with cost
    strictly increasing and delta strictly decreasing."""
    hull: list[tuple[int, float, int]] = []
    for p in points:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # pop b when it lies on or above the a-p segment
            if (a[1] - b[1]) * (p[0] - b[0]) <= (b[1] - p[1]) * (b[0] - a[0]):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


class _Relaxation:
    """Scaled-integer view of an instance plus the hull increments that
    drive the greedy LP bound."""

    def __init__(self, instance: SearchInstance, cost_scale: int):
        self.instance = instance
        self.n = instance.num_layers
        self.scale = cost_scale
        self.costs_int: list[np.ndarray] = []
        self.deltas: list[np.ndarray] = []
        self.deltas_py: list[list[float]] = []
        self.child_order: list[list[int]] = []
        base_cost = np.zeros(self.n, dtype=np.int64)
        base_delta = np.zeros(self.n, dtype=np.float64)
        inc_rows: list[tuple[float, int, int, int, float]] = []
        for i, layer in enumerate(instance.layers):
            c_int = [round(op.cost * cost_scale) for op in layer.ops]
            d = [float(op.score_delta) for op in layer.ops]
            self.costs_int.append(np.asarray(c_int, dtype=np.int64))
            self.deltas.append(np.asarray(d, dtype=np.float64))
            self.deltas_py.append(d)
            self.child_order.append(
                sorted(range(len(d)), key=lambda j: (d[j], c_int[j], j))
            )
            pareto = _pareto_indices(c_int, d)
            hull = _convex_hull([(c_int[j], d[j], j) for j in pareto])
            base_cost[i] = hull[0][0]
            base_delta[i] = hull[0][1]
            for step in range(1, len(hull)):
                dc = hull[step][0] - hull[step - 1][0]
                dd = hull[step][1] - hull[step - 1][1]
                inc_rows.append((-dd / dc, i, step, dc, dd))
        inc_rows.sort(key=lambda row: (-row[0], row[1], row[2]))
        self.base_cost = base_cost
        self.base_delta = base_delta
        self.total_base_cost = int(base_cost.sum())
        self.total_base_delta = float(base_delta.sum())
        self.inc_layer = np.asarray([r[1] for r in inc_rows], dtype=np.int64)
        self.inc_dc = np.asarray([r[3] for r in inc_rows], dtype=np.int64)
        self.inc_dd = np.asarray([r[4] for r in inc_rows], dtype=np.float64)

    def scale_budget(self, limit: float) -> int:
        if math.isinf(limit):
            return int(sum(int(c.max()) for c in self.costs_int)) + 1
        return int(math.floor(limit * self.scale + _BUDGET_EPS))

    def greedy(
        self,
        free_mask: np.ndarray,
        residuals: np.ndarray,
        extra_delta: np.ndarray,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised greedy LP over the free layers' hull increments.

        residuals[j] is the scaled budget left for the free layers after
        their hull-start costs; extra_delta[j] is the already-committed
        delta including the free layers' hull-start deltas.  Returns
        (bounds, fractional_layer) with -1 where the LP is integral.
        Negative residuals come back as +inf bounds.
        """
        mask = free_mask[self.inc_layer]
        g_dc = self.inc_dc[mask]
        g_dd = self.inc_dd[mask]
        g_layer = self.inc_layer[mask]
        m = residuals.shape[0]
        bounds = np.full(m, math.inf)
        frac_layer = np.full(m, -1, dtype=np.int64)
        feasible = residuals >= 0
        if not feasible.any():
            return bounds, frac_layer
        if g_dc.shape[0] == 0:
            bounds[feasible] = extra_delta[feasible]
            return bounds, frac_layer
        cum_dc = np.cumsum(g_dc)
        cum_dd = np.cumsum(g_dd)
        r = residuals[feasible]
        k = np.searchsorted(cum_dc, r, side="right")
        taken_dd = np.where(k > 0, cum_dd[np.maximum(k, 1) - 1], 0.0)
        spent = np.where(k > 0, cum_dc[np.maximum(k, 1) - 1], 0)
        rem = r - spent
        idx = np.minimum(k, g_dc.shape[0] - 1)
        partial = (k < g_dc.shape[0]) & (rem > 0)
        frac_dd = np.where(partial, (rem / g_dc[idx]) * g_dd[idx], 0.0)
        bounds[feasible] = extra_delta[feasible] + taken_dd + frac_dd
        fl = np.where(partial, g_layer[idx], -1)
        frac_layer[feasible] = fl
        return bounds, frac_layer


def lp_bound(
    instance: SearchInstance,
    budget: Budget,
    fixed: Mapping[int, int] | None = None,
    prior: Sequence[Selection] = (),
    overlap_limit: int | None = None,
    config: SolverConfig | None = None,
) -> float:
    """Lower bound on the objective of any completion of `fixed`.

    LP relaxation of the residual multiple-choice knapsack; overlap
    constraints (prior / overlap_limit) are relaxed away, which only
    lowers the bound and keeps it admissible. A fully fixed assignment
    returns its exact objective; +inf means no completion fits the
    budget.
    """
    cfg = config or SolverConfig()
    relax = _Relaxation(instance, cfg.cost_scale)
    fixed = dict(fixed or {})
    free_mask = np.ones(relax.n, dtype=bool)
    fixed_cost = 0
    fixed_delta = 0.0
    for i, j in sorted(fixed.items()):
        if not 0 <= i < relax.n:
            raise ValueError(f"fixed layer {i} out of range")
        if not 0 <= j < len(instance.layers[i].ops):
            raise ValueError(f"fixed op {j} out of range at layer {i}")
        free_mask[i] = False
        fixed_cost += int(relax.costs_int[i][j])
        fixed_delta += relax.deltas_py[i][j]
    base_cost_free = sum(int(relax.base_cost[i]) for i in range(relax.n) if free_mask[i])
    base_delta_free = sum(float(relax.base_delta[i]) for i in range(relax.n) if free_mask[i])
    residual = relax.scale_budget(budget.limit) - fixed_cost - base_cost_free
    bounds, _ = relax.greedy(
        free_mask,
        np.asarray([residual], dtype=np.int64),
        np.asarray([fixed_delta + base_delta_free], dtype=np.float64),
    )
    return float(bounds[0])


class _Node:
    __slots__ = (
        "bound",
        "depth",
        "seq",
        "choices",
        "fixed_cost",
        "fixed_delta",
        "free_base_cost",
        "free_base_delta",
        "free_min_delta",
        "counts",
        "branch_layer",
    )

    def __init__(self, bound, depth, seq, choices, fixed_cost, fixed_delta,
                 free_base_cost, free_base_delta, free_min_delta, counts, branch_layer):
        self.bound = bound
        self.depth = depth
        self.seq = seq
        self.choices = choices
        self.fixed_cost = fixed_cost
        self.fixed_delta = fixed_delta
        self.free_base_cost = free_base_cost
        self.free_base_delta = free_base_delta
        self.free_min_delta = free_min_delta
        self.counts = counts
        self.branch_layer = branch_layer


class _Search:
    """One branch-and-bound run over a prepared relaxation."""

    def __init__(
        self,
        relax: _Relaxation,
        budget_scaled: int,
        priors: Sequence[Selection],
        overlap_limit: int,
        config: SolverConfig,
    ):
        self.relax = relax
        self.n = relax.n
        self.budget = budget_scaled
        self.priors = [p.choices for p in priors]
        self.overlap_limit = overlap_limit
        self.config = config
        # prior op choice per layer, as arrays for fast matching
        self.prior_at = [
            np.asarray([p[i] for p in self.priors], dtype=np.int64)
            for i in range(self.n)
        ] if self.priors else []
        # per-layer unconstrained minimum delta, and per (prior, layer)
        # the extra delta forced by deviating from that prior's op there
        self.min_delta = [float(d.min()) for d in relax.deltas]
        self.dev_pen: list[list[float]] = []
        for p in self.priors:
            pens = []
            for i in range(self.n):
                d = relax.deltas[i]
                if d.shape[0] == 1:
                    pens.append(math.inf if p[i] == 0 else 0.0)
                    continue
                rest = np.delete(d, p[i])
                pens.append(max(0.0, float(rest.min()) - self.min_delta[i]))
            self.dev_pen.append(pens)

        self.lock = threading.Condition()
        self.heap: list[tuple[float, int, int, _Node]] = []
        self.in_flight: dict[int, float] = {}
        self.inc_key: tuple[float, int, tuple[int, ...]] | None = None
        self.nodes_explored = 0
        self.seq = 0
        self.stop_reason: str | None = None
        self.error: BaseException | None = None
        self.deadline = time.monotonic() + config.time_limit_s

    # -- incumbent helpers (call with lock held) --

    def _cutoff(self) -> float:
        if self.inc_key is None:
            return math.inf
        obj = self.inc_key[0]
        return obj + 1e-9 * max(1.0, abs(obj))

    def _offer(self, key: tuple[float, int, tuple[int, ...]]) -> None:
        if self.inc_key is None or key < self.inc_key:
            self.inc_key = key

    def _best_lower_bound(self) -> float:
        lb = math.inf
        if self.heap:
            lb = self.heap[0][0]
        if self.in_flight:
            lb = min(lb, min(self.in_flight.values()))
        return lb

    def _check_limits(self) -> None:
        if self.stop_reason is not None:
            return
        if time.monotonic() > self.deadline:
            self.stop_reason = "time"
        elif self.config.node_limit is not None and self.nodes_explored >= self.config.node_limit:
            self.stop_reason = "nodes"
        elif self.config.gap_tolerance > 0 and self.inc_key is not None:
            if self.inc_key[0] - self._best_lower_bound() <= self.config.gap_tolerance:
                self.stop_reason = "gap"

    def _dev_prefixes(self, free: Sequence[int]) -> list[list[float]]:
        """Per prior, prefix sums of the sorted deviation penalties over
        the free layers. prefix[k] lower-bounds the extra delta any
        completion pays if it must deviate from that prior on >= k of
        those layers (budget-free, so it composes with the LP bound by
        max, not sum)."""
        prefixes = []
        for p_idx in range(len(self.priors)):
            pens = sorted(self.dev_pen[p_idx][i] for i in free)
            acc = [0.0]
            for v in pens:
                acc.append(acc[-1] + v)
            prefixes.append(acc)
        return prefixes

    def _dev_extra(self, prefixes: list[list[float]], n_free: int, counts) -> float:
        worst = 0.0
        for p_idx, cnt in enumerate(counts):
            need = n_free - (self.overlap_limit - cnt)
            if need > 0:
                worst = max(worst, prefixes[p_idx][need])
        return worst

    # -- node expansion (no lock) --

    def _expand(self, node: _Node):
        relax = self.relax
        L = node.branch_layer
        c_layer = relax.costs_int[L]
        d_layer = relax.deltas[L]
        order = relax.child_order[L]

        free_mask = np.zeros(self.n, dtype=bool)
        free_idx: list[int] = []
        for i in range(self.n):
            if node.choices[i] < 0 and i != L:
                free_mask[i] = True
                free_idx.append(i)
        lowest_free = free_idx[0] if free_idx else -1
        base_cost_free = node.free_base_cost - int(relax.base_cost[L])
        base_delta_free = node.free_base_delta - float(relax.base_delta[L])
        min_delta_free = node.free_min_delta - self.min_delta[L]
        dev_prefixes = self._dev_prefixes(free_idx) if self.priors else None

        ops = np.asarray(order, dtype=np.int64)
        add_cost = c_layer[ops]
        add_delta = d_layer[ops]
        residuals = (self.budget - node.fixed_cost - base_cost_free) - add_cost
        extra = node.fixed_delta + add_delta + base_delta_free
        bounds, frac_layers = relax.greedy(free_mask, residuals, extra)

        banned: set[int] = set()
        if self.priors:
            at = self.prior_at[L]
            for p_idx, cnt in enumerate(node.counts):
                if cnt >= self.overlap_limit:
                    banned.add(int(at[p_idx]))

        leaves: list[tuple[float, int, tuple[int, ...]]] = []
        children: list[_Node] = []
        is_leaf = node.depth + 1 == self.n
        for pos in range(ops.shape[0]):
            j = int(ops[pos])
            b = float(bounds[pos])
            if not math.isfinite(b) or j in banned:
                continue
            choices = node.choices[:L] + (j,) + node.choices[L + 1:]
            if self.priors:
                at = self.prior_at[L]
                counts = tuple(
                    c + 1 if int(at[p_idx]) == j else c
                    for p_idx, c in enumerate(node.counts)
                )
            else:
                counts = node.counts
            fixed_cost = node.fixed_cost + int(add_cost[pos])
            if is_leaf:
                obj = 0.0
                for i, ch in enumerate(choices):
                    obj += relax.deltas_py[i][ch]
                leaves.append((obj, fixed_cost, choices))
                continue
            fl = int(frac_layers[pos])
            fixed_delta = node.fixed_delta + float(add_delta[pos])
            bound = max(b, node.bound)
            if dev_prefixes is not None:
                dev = self._dev_extra(dev_prefixes, len(free_idx), counts)
                bound = max(bound, fixed_delta + min_delta_free + dev)
                if not math.isfinite(bound):
                    continue
            children.append(
                _Node(
                    bound=bound,
                    depth=node.depth + 1,
                    seq=0,  # assigned under lock
                    choices=choices,
                    fixed_cost=fixed_cost,
                    fixed_delta=fixed_delta,
                    free_base_cost=base_cost_free,
                    free_base_delta=base_delta_free,
                    free_min_delta=min_delta_free,
                    counts=counts,
                    branch_layer=fl if fl >= 0 else lowest_free,
                )
            )
        return children, leaves

    # -- worker loop --

    def _push(self, child: _Node) -> None:
        self.seq += 1
        child.seq = self.seq
        heapq.heappush(self.heap, (child.bound, -child.depth, child.seq, child))

    def _worker(self, tid: int) -> None:
        try:
            node: _Node | None = None
            while True:
                if node is None:
                    with self.lock:
                        while node is None:
                            self._check_limits()
                            if self.stop_reason is not None:
                                return
                            if self.heap and self.heap[0][0] > self._cutoff():
                                self.heap.clear()
                            if self.heap:
                                _, _, _, node = heapq.heappop(self.heap)
                                self.in_flight[tid] = node.bound
                            elif not self.in_flight:
                                self.stop_reason = "done"
                                self.lock.notify_all()
                                return
                            else:
                                self.lock.wait(timeout=0.02)

                children, leaves = self._expand(node)

                with self.lock:
                    self.nodes_explored += 1
                    for key in leaves:
                        self._offer(key)
                    cutoff = self._cutoff()
                    viable = [ch for ch in children if ch.bound <= cutoff]
                    # plunge: keep the best child for this worker, queue the rest,
                    # so a feasible leaf (and with it pruning power) appears fast
                    nxt: _Node | None = None
                    if viable:
                        best = min(range(len(viable)), key=lambda t: viable[t].bound)
                        nxt = viable[best]
                        for t, ch in enumerate(viable):
                            if t != best:
                                self._push(ch)
                    self._check_limits()
                    if self.stop_reason is not None:
                        if nxt is not None:
                            self._push(nxt)  # keep the lower-bound audit exact
                        del self.in_flight[tid]
                        self.lock.notify_all()
                        return
                    if nxt is None:
                        del self.in_flight[tid]
                    else:
                        self.in_flight[tid] = nxt.bound
                    self.lock.notify_all()
                node = nxt
        except BaseException as exc:  # surface worker failures to run()
            with self.lock:
                self.error = exc
                self.stop_reason = "error"
                self.in_flight.pop(tid, None)
                self.lock.notify_all()

    def run(self) -> tuple[str, tuple | None, float, int]:
        """Returns (stop_reason, incumbent_key, final_lower_bound, nodes)."""
        relax = self.relax
        root_residual = self.budget - relax.total_base_cost
        root_bounds, root_frac = relax.greedy(
            np.ones(self.n, dtype=bool),
            np.asarray([root_residual], dtype=np.int64),
            np.asarray([relax.total_base_delta], dtype=np.float64),
        )
        if not math.isfinite(float(root_bounds[0])):
            return "done", None, math.inf, 0
        root_bound = float(root_bounds[0])
        total_min_delta = sum(self.min_delta)
        if self.priors:
            prefixes = self._dev_prefixes(range(self.n))
            dev = self._dev_extra(prefixes, self.n, (0,) * len(self.priors))
            root_bound = max(root_bound, total_min_delta + dev)
            if not math.isfinite(root_bound):
                return "done", None, math.inf, 0
        fl = int(root_frac[0])
        root = _Node(
            bound=root_bound,
            depth=0,
            seq=0,
            choices=(-1,) * self.n,
            fixed_cost=0,
            fixed_delta=0.0,
            free_base_cost=relax.total_base_cost,
            free_base_delta=relax.total_base_delta,
            free_min_delta=total_min_delta,
            counts=(0,) * len(self.priors),
            branch_layer=fl if fl >= 0 else 0,
        )
        heapq.heappush(self.heap, (root.bound, 0, 0, root))

        if self.config.threads == 1:
            self._worker(0)
        else:
            workers = [
                threading.Thread(target=self._worker, args=(tid,), daemon=True)
                for tid in range(self.config.threads)
            ]
            for w in workers:
                w.start()
            for w in workers:
                w.join()

        with self.lock:
            if self.error is not None:
                raise self.error
            lb = self._best_lower_bound()
            if self.stop_reason == "done":
                lb = self.inc_key[0] if self.inc_key is not None else math.inf
            return self.stop_reason or "done", self.inc_key, lb, self.nodes_explored


def solve(
    instance: SearchInstance,
    budget: Budget,
    prior: Sequence[Selection] = (),
    overlap_limit: int | None = None,
    config: SolverConfig | None = None,
) -> SolveResult:
    """Minimise the summed score deltas under budget and overlap caps.

    With status optimal the returned selection is the tie-break-minimal
    optimum: no selection with cost <= budget and overlap(sel, p) <=
    overlap_limit for every prior p has a lower objective, and among
    equal-objective optima the returned one has the lowest scaled cost,
    then the lexicographically smallest choice vector. Infeasibility is
    reported as a status, not an error.
    """
    violations = validate_instance(instance)
    if violations:
        raise InstanceValidationError(violations)
    cfg = config or SolverConfig()
    n = instance.num_layers
    if overlap_limit is None:
        overlap_limit = n
    if not 0 <= overlap_limit <= n:
        raise ValueError(f"overlap_limit must be in [0, {n}], got {overlap_limit}")
    for p in prior:
        check_selection(instance, p)

    relax = _Relaxation(instance, cfg.cost_scale)
    search = _Search(relax, relax.scale_budget(budget.limit), list(prior), overlap_limit, cfg)
    reason, inc_key, lower_bound, nodes = search.run()

    if inc_key is None:
        if reason in ("time", "nodes"):
            return SolveResult(None, None, None, STATUS_TIMEOUT, math.inf, nodes)
        return SolveResult(None, None, None, STATUS_INFEASIBLE, 0.0, nodes)

    sel = Selection(inc_key[2])
    obj = core_objective(instance, sel)
    cost_ms = core_cost(instance, sel)
    if reason == "done":
        return SolveResult(sel, obj, cost_ms, STATUS_OPTIMAL, 0.0, nodes)
    # early stops (time, node or gap limit) never claim optimality: the
    # tie-break-minimality part of the optimal contract needs a full drain
    gap = max(0.0, obj - lower_bound)
    return SolveResult(sel, obj, cost_ms, STATUS_FEASIBLE, gap, nodes)


def solve_k_diverse(
    instance: SearchInstance,
    budget: Budget,
    k: int,
    overlap_fraction: float = 0.7,
    config: SolverConfig | None = None,
    progress: Callable[[int, SolveResult], None] | None = None,
) -> SolveReport:
    """Solve up to k times, each run constrained to overlap at most
    floor(overlap_fraction * N) layers with every earlier solution.

    Solutions appear in the order found; once overlap constraints bind,
    objectives are not guaranteed non-decreasing. The loop stops at the
    first infeasible result or a timeout that produced no incumbent
    (later iterations only add constraints).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 <= overlap_fraction <= 1.0:
        raise ValueError("overlap_fraction must be in [0, 1]")
    n = instance.num_layers
    # +1e-9 guards the float product just below an integer
    overlap_limit = int(math.floor(overlap_fraction * n + 1e-9))
    start = time.perf_counter()
    results: list[SolveResult] = []
    priors: list[Selection] = []
    for i in range(k):
        res = solve(instance, budget, priors, overlap_limit, config)
        if res.status in (STATUS_INFEASIBLE, STATUS_TIMEOUT):
            if i == 0:
                results.append(res)
            break
        results.append(res)
        priors.append(res.selection)
        if progress is not None:
            progress(i, res)
    return SolveReport(
        instance_name=instance.name,
        budget_ms=budget.limit,
        overlap_limit=overlap_limit,
        results=tuple(results),
        wall_time_s=time.perf_counter() - start,
    )
