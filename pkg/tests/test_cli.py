import csv
import json

import pytest

from lana import synth
from lana.cli import main
from lana.core import budget_from_ratio, teacher_selection
from lana.lut_io import parse_report, write_instance
from lana.solver import SolverConfig, solve

from _support import make_instance


@pytest.fixture
def instance_file(tmp_path):
    inst = synth.tradeoff_instance(2, 6, 5)
    path = tmp_path / "instance.json"
    path.write_text(write_instance(inst), encoding="utf-8")
    return inst, path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestValidate:
    def test_valid_instance(self, instance_file, capsys):
        _, path = instance_file
        assert main(["validate", str(path)]) == 0
        assert "ok" in capsys.readouterr().out

    def test_invalid_instance(self, tmp_path, capsys):
        inst = make_instance([(0, [("teacher", 0.3, 1.0), ("a", 0.1, 0.5)])])
        doc = {
            "format_version": 1, "name": "bad", "cost_unit": "ms",
            "layers": [{"layer_index": 0, "teacher_index": 0, "ops": [
                {"op_id": "teacher", "score_delta": 0.3, "cost": 1.0},
                {"op_id": "a", "score_delta": 0.1, "cost": 0.5},
            ]}],
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        assert main(["validate", str(path)]) == 1
        assert "score_delta" in capsys.readouterr().out

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.json")]) == 1


class TestSolve:
    def test_ratio_one_returns_teacher(self, instance_file, tmp_path):
        inst, path = instance_file
        out = tmp_path / "report.json"
        code = main(["solve", str(path), "--budget-ratio", "1.0",
                     "--out", str(out), "--threads", "1"])
        assert code == 0
        report = parse_report(out.read_text(encoding="utf-8"))
        assert report["solutions"][0]["choices"] == list(teacher_selection(inst).choices)
        assert report["solutions"][0]["objective"] == 0
        assert report["wall_time_s"] == 0

    def test_k_diverse_overlaps(self, instance_file, tmp_path):
        inst, path = instance_file
        out = tmp_path / "report.json"
        code = main(["solve", str(path), "--budget-ratio", "0.6", "--k", "4",
                     "--overlap", "0.7", "--out", str(out), "--threads", "1"])
        assert code == 0
        report = parse_report(out.read_text(encoding="utf-8"))
        limit = report["overlap_limit"]
        assert limit == 4  # floor(0.7 * 6)
        sols = [s["choices"] for s in report["solutions"]]
        for i, a in enumerate(sols):
            for b in sols[i + 1:]:
                assert sum(1 for x, y in zip(a, b) if x == y) <= limit

    def test_zero_budget_exits_2(self, instance_file, tmp_path):
        _, path = instance_file
        code = main(["solve", str(path), "--budget-ms", "0",
                     "--out", str(tmp_path / "r.json"), "--threads", "1"])
        assert code == 2

    def test_both_budget_flags_is_usage_error(self, instance_file, tmp_path):
        _, path = instance_file
        code = main(["solve", str(path), "--budget-ratio", "0.5", "--budget-ms", "3",
                     "--out", str(tmp_path / "r.json")])
        assert code == 1

    def test_missing_budget_flag_is_usage_error(self, instance_file, tmp_path):
        _, path = instance_file
        assert main(["solve", str(path), "--out", str(tmp_path / "r.json")]) == 1

    def test_k_capped_with_warning(self, instance_file, tmp_path, capsys):
        _, path = instance_file
        code = main(["solve", str(path), "--budget-ratio", "0.9", "--k", "150",
                     "--out", str(tmp_path / "r.json"), "--threads", "1"])
        assert code == 0
        assert "capped" in capsys.readouterr().err

    def test_progress_line_per_solution(self, instance_file, tmp_path, capsys):
        _, path = instance_file
        main(["solve", str(path), "--budget-ratio", "0.7", "--k", "2",
              "--out", str(tmp_path / "r.json"), "--threads", "1"])
        err = capsys.readouterr().err
        assert err.count("solution ") == 2


class TestThreadsEnv:
    def test_lana_threads_env_fallback(self, instance_file, tmp_path, monkeypatch):
        _, path = instance_file
        monkeypatch.setenv("LANA_THREADS", "2")
        out = tmp_path / "r.json"
        assert main(["solve", str(path), "--budget-ratio", "0.8", "--out", str(out)]) == 0

    def test_garbage_env_falls_back(self, instance_file, tmp_path, monkeypatch):
        _, path = instance_file
        monkeypatch.setenv("LANA_THREADS", "not-a-number")
        out = tmp_path / "r.json"
        assert main(["solve", str(path), "--budget-ratio", "0.8", "--out", str(out)]) == 0


class TestSweep:
    def test_rows_and_monotonicity(self, instance_file, tmp_path):
        _, path = instance_file
        out = tmp_path / "sweep.csv"
        code = main(["sweep", str(path), "--ratios", "0.4,0.6,0.8,1.0",
                     "--out", str(out), "--threads", "1"])
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == ["ratio", "best_objective", "cost_ms", "status"]
        objs = [float(r[1]) for r in rows[1:] if r[3] == "optimal"]
        assert objs == sorted(objs, reverse=True)

    def test_infeasible_ratio_rows(self, instance_file, tmp_path):
        _, path = instance_file
        out = tmp_path / "sweep.csv"
        # identity at 0.01 ms per layer keeps even tiny ratios feasible, so
        # use a ratio far below the identity floor
        code = main(["sweep", str(path), "--ratios", "0.0001,1.0",
                     "--out", str(out), "--threads", "1"])
        assert code == 0
        rows = read_csv(out)
        assert rows[1][3] == "infeasible"
        assert rows[1][1] == ""
        assert rows[2][3] == "optimal"

    def test_bad_ratio_list(self, instance_file, tmp_path):
        _, path = instance_file
        assert main(["sweep", str(path), "--ratios", "0.5,-1",
                     "--out", str(tmp_path / "s.csv")]) == 1


class TestStatsAndRank:
    @pytest.fixture
    def report_file(self, instance_file, tmp_path):
        inst, path = instance_file
        out = tmp_path / "report.json"
        assert main(["solve", str(path), "--budget-ratio", "0.6", "--k", "5",
                     "--out", str(out), "--threads", "1"]) == 0
        return inst, path, out

    def test_stats_histogram(self, report_file, tmp_path):
        inst, inst_path, report_path = report_file
        out = tmp_path / "stats.csv"
        assert main(["stats", str(report_path), str(inst_path),
                     "--top", "3", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == ["op_id", "count", "fraction"]
        total = sum(int(r[1]) for r in rows[1:])
        assert total == 3 * inst.num_layers

    def test_rank_without_measured(self, report_file, tmp_path):
        _, inst_path, report_path = report_file
        out = tmp_path / "rank.csv"
        assert main(["rank", str(report_path), str(inst_path), "--out", str(out)]) == 0
        rows = read_csv(out)
        proxies = [float(r[2]) for r in rows[1:]]
        assert proxies == sorted(proxies)

    def test_rank_with_measured_prints_tau(self, report_file, tmp_path, capsys):
        inst, inst_path, report_path = report_file
        report = parse_report(report_path.read_text(encoding="utf-8"))
        entries = [
            {"choices": s["choices"], "measured": s["objective"]}
            for s in report["solutions"]
        ]
        measured_path = tmp_path / "measured.json"
        measured_path.write_text(
            json.dumps({"instance": inst.name, "entries": entries}), encoding="utf-8"
        )
        out = tmp_path / "rank.csv"
        code = main(["rank", str(report_path), str(inst_path),
                     "--measured", str(measured_path), "--out", str(out)])
        assert code == 0
        assert "kendall_tau=1.0" in capsys.readouterr().out

    def test_report_instance_mismatch(self, report_file, tmp_path):
        _, _, report_path = report_file
        other = synth.tradeoff_instance(9, 6, 5)
        other_path = tmp_path / "other.json"
        other_path.write_text(write_instance(other), encoding="utf-8")
        assert main(["stats", str(report_path), str(other_path),
                     "--out", str(tmp_path / "s.csv")]) == 1


class TestRandom:
    def test_population_and_summary(self, instance_file, tmp_path, capsys):
        inst, path = instance_file
        out = tmp_path / "pop.csv"
        code = main(["random", str(path), "--budget-ratio", "0.7", "--n", "200",
                     "--seed", "9", "--out", str(out), "--threads", "1"])
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == ["sample_index", "objective", "cost_ms"]
        assert len(rows) > 1
        summary = capsys.readouterr().out
        assert "random_min=" in summary and "ilp_objective=" in summary
        budget = budget_from_ratio(inst, 0.7)
        ilp = solve(inst, budget, config=SolverConfig(time_limit_s=30.0))
        assert min(float(r[1]) for r in rows[1:]) >= ilp.objective

    def test_impossible_budget_exits_2(self, instance_file, tmp_path):
        _, path = instance_file
        assert main(["random", str(path), "--budget-ratio", "1e-6", "--n", "5",
                     "--out", str(tmp_path / "p.csv")]) == 2


class TestZeroShot:
    def test_ratio_one_returns_teacher(self, instance_file, tmp_path):
        inst, path = instance_file
        out = tmp_path / "zs.json"
        code = main(["zeroshot", str(path), "--budget-ratio", "1.0",
                     "--out", str(out), "--threads", "1"])
        assert code == 0
        report = parse_report(out.read_text(encoding="utf-8"))
        # restricted pool: teacher is op 0, identity op 1 at every layer
        assert report["solutions"][0]["choices"] == [0] * inst.num_layers

    def test_matches_brute_force_on_restricted_pool(self, tmp_path):
        inst = synth.zero_shot_instance(5, 6)
        path = tmp_path / "zs_instance.json"
        path.write_text(write_instance(inst), encoding="utf-8")
        out = tmp_path / "zs.json"
        code = main(["zeroshot", str(path), "--budget-ratio", "0.5",
                     "--out", str(out), "--threads", "1"])
        assert code == 0
        from _support import brute_force_solve
        expected = brute_force_solve(inst, budget_from_ratio(inst, 0.5).limit)
        report = parse_report(out.read_text(encoding="utf-8"))
        assert report["solutions"][0]["choices"] == list(expected[2])
        assert report["solutions"][0]["objective"] == expected[0]

    def test_missing_identity_lists_layers(self, tmp_path, capsys):
        inst = make_instance([
            (0, [("teacher", 0.0, 1.0), ("identity", 0.2, 0.01)]),
            (0, [("teacher", 0.0, 1.0), ("conv", 0.1, 0.5)]),
        ])
        path = tmp_path / "partial.json"
        path.write_text(write_instance(inst), encoding="utf-8")
        code = main(["zeroshot", str(path), "--budget-ratio", "1.0",
                     "--out", str(tmp_path / "o.json")])
        assert code == 1
        assert "[1]" in capsys.readouterr().err

    def test_allow_missing_identity(self, tmp_path):
        inst = make_instance([
            (0, [("teacher", 0.0, 1.0), ("identity", 0.2, 0.01)]),
            (0, [("teacher", 0.0, 1.0), ("conv", 0.1, 0.5)]),
        ])
        path = tmp_path / "partial.json"
        path.write_text(write_instance(inst), encoding="utf-8")
        out = tmp_path / "o.json"
        code = main(["zeroshot", str(path), "--budget-ratio", "1.0",
                     "--allow-missing-identity", "--out", str(out), "--threads", "1"])
        assert code == 0
        report = parse_report(out.read_text(encoding="utf-8"))
        assert report["solutions"][0]["choices"] == [0, 0]
