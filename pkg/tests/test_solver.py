import itertools
import math
import random

import pytest

from lana import synth
from lana.core import Budget, Selection, budget_from_ratio, overlap, teacher_selection
from lana.lut_io import InstanceValidationError
from lana.solver import (
    STATUS_FEASIBLE,
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    STATUS_TIMEOUT,
    SolverConfig,
    dominance_frontier,
    lp_bound,
    solve,
    solve_k_diverse,
)

from _support import (
    brute_force_k_diverse,
    brute_force_solve,
    dominance_oracle,
    make_instance,
)

FAST = SolverConfig(time_limit_s=30.0)


class TestSolveBasics:
    def test_teacher_budget_returns_teacher(self):
        # nonnegative deltas and a budget the teacher meets exactly
        inst = synth.uniform_instance(1, 5, 4)
        res = solve(inst, budget_from_ratio(inst, 1.0), config=FAST)
        assert res.status == STATUS_OPTIMAL
        assert res.selection == teacher_selection(inst)
        assert res.objective == 0.0
        assert res.gap == 0.0

    def test_matches_brute_force_n6_m4(self):
        inst = synth.uniform_instance(42, 6, 4)
        budget = budget_from_ratio(inst, 0.6)
        res = solve(inst, budget, config=FAST)
        expected = brute_force_solve(inst, budget.limit)
        assert expected is not None
        assert res.status == STATUS_OPTIMAL
        assert res.objective == expected[0]
        assert res.selection.choices == expected[2]

    def test_budget_below_min_costs_infeasible(self):
        inst = synth.uniform_instance(2, 4, 3)
        res = solve(inst, Budget(0.0), config=FAST)
        assert res.status == STATUS_INFEASIBLE
        assert res.selection is None
        assert res.gap == 0.0

    def test_negative_deltas_not_clamped(self):
        inst = make_instance([
            (0, [("teacher", 0.0, 1.0), ("better", -0.4, 0.9)]),
            (0, [("teacher", 0.0, 1.0), ("worse", 0.3, 0.2)]),
        ])
        res = solve(inst, budget_from_ratio(inst, 1.0), config=FAST)
        assert res.status == STATUS_OPTIMAL
        assert res.objective == pytest.approx(-0.4, abs=1e-12)
        assert res.selection.choices == (1, 0)

    def test_tie_break_prefers_lower_cost_then_lex(self):
        # two optima at objective 0.2: (0,1) costs 1.5, (1,0) costs 1.7
        inst = make_instance([
            (0, [("teacher", 0.0, 1.0), ("a", 0.2, 0.7)]),
            (0, [("teacher", 0.0, 1.0), ("b", 0.2, 0.5)]),
        ])
        res = solve(inst, Budget(1.5), config=FAST)
        assert res.objective == pytest.approx(0.2, abs=1e-12)
        assert res.selection.choices == (0, 1)
        # equal costs: lexicographically smallest choices win
        inst2 = make_instance([
            (0, [("teacher", 0.0, 1.0), ("a", 0.2, 0.5)]),
            (0, [("teacher", 0.0, 1.0), ("b", 0.2, 0.5)]),
        ])
        res2 = solve(inst2, Budget(1.5), config=FAST)
        assert res2.selection.choices == (0, 1)

    def test_invalid_instance_rejected(self):
        inst = make_instance([(0, [("teacher", 0.9, 1.0)])])
        with pytest.raises(InstanceValidationError):
            solve(inst, Budget(1.0))

    def test_overlap_limit_range_checked(self):
        inst = synth.uniform_instance(3, 4, 3)
        with pytest.raises(ValueError):
            solve(inst, Budget(10.0), overlap_limit=5)

    def test_infinite_budget(self):
        inst = synth.uniform_instance(9, 5, 4, negative=True)
        res = solve(inst, Budget(math.inf), config=FAST)
        expected = brute_force_solve(inst, math.inf)
        assert res.status == STATUS_OPTIMAL
        assert res.objective == expected[0]


class TestOracleAgreement:
    def test_seeded_sweep_against_enumeration(self):
        rng = random.Random(2024)
        for trial in range(25):
            n, m = rng.randint(3, 7), rng.randint(2, 5)
            inst = synth.uniform_instance(1000 + trial, n, m, negative=(trial % 3 == 0))
            budget = budget_from_ratio(inst, rng.uniform(0.3, 1.0))
            res = solve(inst, budget, config=FAST)
            expected = brute_force_solve(inst, budget.limit)
            if expected is None:
                assert res.status == STATUS_INFEASIBLE
            else:
                assert res.status == STATUS_OPTIMAL
                assert res.objective == expected[0]
                assert res.selection.choices == expected[2]

    def test_with_priors_against_enumeration(self):
        rng = random.Random(77)
        for trial in range(10):
            n, m = rng.randint(3, 6), rng.randint(2, 4)
            inst = synth.uniform_instance(2000 + trial, n, m)
            budget = budget_from_ratio(inst, rng.uniform(0.5, 1.0))
            limit = rng.randint(0, n - 1)
            expected = brute_force_k_diverse(inst, budget.limit, 4, limit)
            priors = []
            for step in range(4):
                res = solve(inst, budget, priors, limit, FAST)
                if step >= len(expected):
                    assert res.status == STATUS_INFEASIBLE
                    break
                assert res.status == STATUS_OPTIMAL
                assert res.objective == expected[step][0]
                assert res.selection.choices == expected[step][2]
                priors.append(res.selection)


class TestMonotonicityAndScaling:
    def test_budget_monotonicity(self):
        rng = random.Random(5)
        for trial in range(15):
            inst = synth.uniform_instance(3000 + trial, rng.randint(3, 6), rng.randint(3, 5))
            r1, r2 = sorted((rng.uniform(0.35, 1.0), rng.uniform(0.35, 1.0)))
            res1 = solve(inst, budget_from_ratio(inst, r1), config=FAST)
            res2 = solve(inst, budget_from_ratio(inst, r2), config=FAST)
            if res1.status == STATUS_OPTIMAL:
                assert res2.status == STATUS_OPTIMAL
                assert res2.objective <= res1.objective

    def test_overlap_monotonicity(self):
        inst = synth.uniform_instance(31, 6, 4)
        budget = budget_from_ratio(inst, 0.7)
        first = solve(inst, budget, config=FAST)
        prior = [first.selection]
        prev = math.inf
        for limit in range(0, 7):
            res = solve(inst, budget, prior, limit, FAST)
            if res.status != STATUS_OPTIMAL:
                continue
            assert res.objective <= prev + 1e-12
            prev = res.objective

    def test_scaling_invariance(self):
        # powers of two keep grid costs exact under the default scaling
        for seed in range(8):
            inst = synth.uniform_instance(4000 + seed, 5, 4)
            budget = budget_from_ratio(inst, 0.62)
            base = solve(inst, budget, config=FAST)
            for alpha in (0.5, 2.0, 4.0):
                scaled = make_instance([
                    (
                        layer.teacher_index,
                        [(op.op_id, op.score_delta, op.cost * alpha) for op in layer.ops],
                    )
                    for layer in inst.layers
                ])
                res = solve(scaled, Budget(budget.limit * alpha), config=FAST)
                assert res.status == base.status
                if base.selection is not None:
                    assert res.selection.choices == base.selection.choices


class TestDeterminismAndLimits:
    def test_repeat_runs_identical(self):
        inst = synth.uniform_instance(8, 6, 5)
        budget = budget_from_ratio(inst, 0.55)
        a = solve(inst, budget, config=FAST)
        b = solve(inst, budget, config=FAST)
        assert (a.selection, a.objective, a.status, a.gap) == (
            b.selection, b.objective, b.status, b.gap,
        )

    def test_thread_count_does_not_change_result(self):
        inst = synth.uniform_instance(21, 8, 5)
        budget = budget_from_ratio(inst, 0.5)
        results = [
            solve(inst, budget, config=SolverConfig(time_limit_s=30.0, threads=t))
            for t in (1, 2, 4)
        ]
        assert len({(r.selection, r.objective, r.status) for r in results}) == 1

    def test_node_limit_yields_feasible_or_timeout(self):
        inst = synth.uniform_instance(13, 8, 6)
        budget = budget_from_ratio(inst, 0.5)
        res = solve(inst, budget, config=SolverConfig(node_limit=2))
        assert res.status in (STATUS_FEASIBLE, STATUS_TIMEOUT)
        if res.status == STATUS_FEASIBLE:
            assert res.gap >= 0
            assert res.objective is not None
        else:
            assert res.selection is None

    def test_gap_tolerance_accepts_early_stop(self):
        inst = synth.uniform_instance(14, 8, 6)
        budget = budget_from_ratio(inst, 0.5)
        res = solve(inst, budget, config=SolverConfig(gap_tolerance=0.5))
        assert res.status in (STATUS_OPTIMAL, STATUS_FEASIBLE)
        if res.status == STATUS_FEASIBLE:
            assert res.gap <= 0.5

    def test_feasible_results_respect_constraints(self):
        inst = synth.uniform_instance(15, 8, 6)
        budget = budget_from_ratio(inst, 0.5)
        res = solve(inst, budget, config=SolverConfig(node_limit=40))
        if res.selection is not None:
            from lana.core import cost as core_cost
            assert core_cost(inst, res.selection) <= budget.limit + 1e-9


class TestKDiverse:
    def test_k1_equals_single_solve(self):
        inst = synth.uniform_instance(6, 6, 4)
        budget = budget_from_ratio(inst, 0.7)
        single = solve(inst, budget, config=FAST)
        report = solve_k_diverse(inst, budget, k=1, config=FAST)
        assert len(report.results) == 1
        assert report.results[0].selection == single.selection
        assert report.results[0].objective == single.objective

    def test_pairwise_overlap_cap(self):
        inst = synth.uniform_instance(17, 10, 5)
        budget = budget_from_ratio(inst, 0.65)
        report = solve_k_diverse(inst, budget, k=3, overlap_fraction=0.7, config=FAST)
        sels = [r.selection for r in report.results]
        assert report.overlap_limit == 7
        for a, b in itertools.combinations(sels, 2):
            assert overlap(a, b) <= 7

    def test_exhausts_feasible_set_then_stops(self):
        # 2 layers x 2 ops, everything feasible: exactly 4 solutions come back
        inst = make_instance([
            (0, [("teacher", 0.0, 1.0), ("a", 0.3, 0.5)]),
            (0, [("teacher", 0.0, 1.0), ("b", 0.4, 0.5)]),
        ])
        report = solve_k_diverse(inst, Budget(2.0), k=100, overlap_fraction=0.7, config=FAST)
        got = [r.selection.choices for r in report.results]
        expected = [e[2] for e in brute_force_k_diverse(inst, 2.0, 100, report.overlap_limit)]
        assert got == expected
        assert len(got) == 4

    def test_overlap_limit_floor(self):
        inst = synth.uniform_instance(23, 10, 3)
        report = solve_k_diverse(inst, budget_from_ratio(inst, 1.0), k=1,
                                 overlap_fraction=0.7, config=FAST)
        assert report.overlap_limit == 7

    def test_bad_args(self):
        inst = synth.uniform_instance(1, 3, 3)
        with pytest.raises(ValueError):
            solve_k_diverse(inst, Budget(1.0), k=0)
        with pytest.raises(ValueError):
            solve_k_diverse(inst, Budget(1.0), k=1, overlap_fraction=1.5)


class TestLpBound:
    def test_fully_fixed_returns_exact_objective(self):
        inst = synth.uniform_instance(26, 5, 4)
        rng = random.Random(0)
        from lana.core import objective as core_objective
        for _ in range(10):
            choices = tuple(rng.randrange(4) for _ in range(5))
            fixed = dict(enumerate(choices))
            bound = lp_bound(inst, Budget(math.inf), fixed)
            assert bound == core_objective(inst, Selection(choices))

    def test_unconstrained_bound_is_min_delta_sum(self):
        inst = synth.uniform_instance(27, 6, 5, negative=True)
        expected = sum(min(op.score_delta for op in layer.ops) for layer in inst.layers)
        assert lp_bound(inst, Budget(math.inf)) == pytest.approx(expected, abs=1e-12)

    def test_admissible_on_random_partial_assignments(self):
        rng = random.Random(123)
        inst = synth.uniform_instance(28, 6, 4)
        budget = budget_from_ratio(inst, 0.6)
        for _ in range(40):
            depth = rng.randint(0, 6)
            layers = rng.sample(range(6), depth)
            fixed = {i: rng.randrange(4) for i in layers}
            bound = lp_bound(inst, budget, fixed)
            best = _best_completion(inst, budget.limit, fixed)
            if best is None:
                continue  # no feasible completion: any bound is admissible
            assert bound <= best + 1e-9

    def test_infeasible_residual_is_inf(self):
        inst = synth.uniform_instance(29, 4, 3)
        assert lp_bound(inst, Budget(0.0)) == math.inf


def _best_completion(inst, limit_ms, fixed):
    """Brute-force minimum over completions of `fixed` within budget."""
    best = None
    ranges = [
        [fixed[i]] if i in fixed else range(len(layer.ops))
        for i, layer in enumerate(inst.layers)
    ]
    from _support import scaled_budget, scaled_costs
    sc = scaled_costs(inst)
    cap = scaled_budget(limit_ms)
    for choice in itertools.product(*ranges):
        if sum(sc[i][c] for i, c in enumerate(choice)) > cap:
            continue
        obj = 0.0
        for i, c in enumerate(choice):
            obj += inst.layers[i].ops[c].score_delta
        if best is None or obj < best:
            best = obj
    return best


class TestDominanceFrontier:
    def test_equal_delta_higher_cost_removed(self):
        inst = make_instance([(2, [("a", 0.5, 1.0), ("b", 0.5, 2.0), ("teacher", 0.0, 3.0)])])
        frontier = dominance_frontier(inst.layers[0])
        ids = [op.op_id for op in frontier]
        assert "b" not in ids
        assert ids == ["a", "teacher"]

    def test_strict_frontier_unchanged(self):
        inst = make_instance([(2, [("x", 0.9, 0.1), ("y", 0.5, 0.5), ("teacher", 0.0, 1.0)])])
        frontier = dominance_frontier(inst.layers[0])
        assert [op.op_id for op in frontier] == ["x", "y", "teacher"]

    def test_random_layers_match_quadratic_oracle(self):
        rng = random.Random(9)
        for trial in range(30):
            m = rng.randint(2, 20)
            inst = synth.uniform_instance(5000 + trial, 1, m)
            layer = inst.layers[0]
            assert dominance_frontier(layer) == dominance_oracle(layer)

    def test_sorted_cost_ascending_delta_strictly_decreasing(self):
        for seed in range(10):
            inst = synth.uniform_instance(6000 + seed, 1, 20)
            frontier = dominance_frontier(inst.layers[0])
            costs = [op.cost for op in frontier]
            deltas = [op.score_delta for op in frontier]
            assert costs == sorted(costs)
            assert all(a > b for a, b in zip(deltas, deltas[1:]))
