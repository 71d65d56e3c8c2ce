"""Command-line entry point.

Subcommands: validate, solve, sweep, stats, rank, random, zeroshot.
Exit codes are a stable contract: 0 success, 1 usage/IO error, 2 no
solution produced (infeasible budget, or a failed sampling run).

Reports are byte-deterministic given inputs, flags and seeds; pass
--timing to embed real wall-clock time in a report at the expense of
that determinism. Thread count comes from --threads, falling back to
the LANA_THREADS environment variable, then to machine parallelism.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from typing import Sequence

from . import analysis, baselines, lut_io, solver
from .core import (
    Budget,
    SearchInstance,
    Selection,
    budget_from_ratio,
    cost as core_cost,
)

K_CAP = 100


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _default_threads() -> int:
    env = os.environ.get("LANA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _add_budget_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--budget-ratio", type=float, help="budget as a fraction of teacher cost")
    group.add_argument("--budget-ms", type=float, help="absolute budget in milliseconds")


def _add_solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=1, help="number of diverse solutions (capped at %d)" % K_CAP)
    p.add_argument("--overlap", type=float, default=0.7, help="overlap fraction of N allowed between solutions")
    p.add_argument("--time-limit", type=float, default=60.0, help="wall-clock limit per solution, seconds")
    p.add_argument("--threads", type=int, default=None, help="solver worker threads")
    p.add_argument("--timing", action="store_true", help="embed real wall time in the report")
    p.add_argument("--out", required=True, help="report output path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lana", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check an instance file against the model invariants")
    p.add_argument("instance")

    p = sub.add_parser("solve", help="find up to k diverse selections under a budget")
    p.add_argument("instance")
    _add_budget_flags(p)
    _add_solve_flags(p)

    p = sub.add_parser("sweep", help="best objective across budget ratios, CSV out")
    p.add_argument("instance")
    p.add_argument("--ratios", required=True, help="comma-separated budget ratios, e.g. 0.2,0.3,0.5")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--time-limit", type=float, default=60.0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("stats", help="op histogram over the top solutions of a report")
    p.add_argument("report")
    p.add_argument("instance")
    p.add_argument("--top", type=int, default=100)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rank", help="rank a report's solutions, optionally against measured scores")
    p.add_argument("report")
    p.add_argument("instance")
    p.add_argument("--measured", default=None, help="measured-scores JSON file")
    p.add_argument("--out", required=True)

    p = sub.add_parser("random", help="random feasible baseline population, CSV out")
    p.add_argument("instance")
    p.add_argument("--budget-ratio", type=float, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser(
        "zeroshot",
        help="solve with the pool restricted to teacher and identity ops",
        description="Restrict every layer to its teacher op plus the identity op, "
                    "then solve. Choices in the report index the restricted pool "
                    "(per layer: kept ops in their original order), not the full "
                    "instance.",
    )
    p.add_argument("instance")
    _add_budget_flags(p)
    p.add_argument("--identity-id", default="identity")
    p.add_argument("--allow-missing-identity", action="store_true",
                   help="keep teacher-only layers instead of failing when identity is absent")
    _add_solve_flags(p)

    return parser


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_instance(path: str) -> SearchInstance:
    return lut_io.parse_instance(_read(path))


def _budget_for(instance: SearchInstance, args: argparse.Namespace) -> Budget:
    if args.budget_ratio is not None:
        return budget_from_ratio(instance, args.budget_ratio)
    if args.budget_ms < 0:
        raise ValueError("--budget-ms must be >= 0")
    return Budget(args.budget_ms)


def _solver_config(args: argparse.Namespace) -> solver.SolverConfig:
    threads = args.threads if args.threads is not None else _default_threads()
    return solver.SolverConfig(time_limit_s=args.time_limit, threads=threads)


def _capped_k(args: argparse.Namespace) -> int:
    if args.k > K_CAP:
        sys.stderr.write(f"warning: k={args.k} capped at {K_CAP}\n")
        return K_CAP
    if args.k < 1:
        raise ValueError("--k must be >= 1")
    return args.k


def _run_solve(instance: SearchInstance, budget: Budget, args: argparse.Namespace) -> int:
    def progress(i: int, res: solver.SolveResult) -> None:
        sys.stderr.write(
            f"solution {i}: objective={res.objective} cost_ms={res.cost_ms} "
            f"status={res.status}\n"
        )

    report = solver.solve_k_diverse(
        instance, budget, k=_capped_k(args),
        overlap_fraction=args.overlap, config=_solver_config(args),
        progress=progress,
    )
    rows = report.solution_rows()
    _write(args.out, lut_io.write_report(
        instance_name=report.instance_name,
        budget_ms=report.budget_ms,
        overlap_limit=report.overlap_limit,
        solutions=rows,
        wall_time_s=report.wall_time_s if args.timing else 0.0,
    ))
    if not rows:
        why = report.results[0].status if report.results else "infeasible"
        sys.stderr.write(f"no solution: {why}\n")
        return 2
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        _load_instance(args.instance)
    except lut_io.InstanceValidationError as exc:
        for v in exc.violations:
            print(v)
        return 1
    print("ok")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    return _run_solve(instance, _budget_for(instance, args), args)


def cmd_sweep(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    try:
        ratios = [float(tok) for tok in args.ratios.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"--ratios must be comma-separated numbers: {exc}") from exc
    if not ratios or any(not r > 0 for r in ratios):
        raise ValueError("--ratios must be a non-empty list of positive numbers")
    k = _capped_k(args)
    config = _solver_config(args)
    lines = [["ratio", "best_objective", "cost_ms", "status"]]
    for ratio in ratios:
        report = solver.solve_k_diverse(
            instance, budget_from_ratio(instance, ratio), k=k,
            overlap_fraction=0.7, config=config,
        )
        best = report.results[0] if report.results else None
        if best is None or best.selection is None:
            status = best.status if best is not None else solver.STATUS_INFEASIBLE
            lines.append([repr(ratio), "", "", status])
        else:
            lines.append([repr(ratio), repr(best.objective), repr(best.cost_ms), best.status])
    _write_csv(args.out, lines)
    return 0


def _write_csv(path: str, rows: Sequence[Sequence[object]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)


def _selections_from_report(report: dict, instance: SearchInstance) -> list[Selection]:
    if report["instance"] != instance.name:
        raise ValueError(
            f"report is for instance {report['instance']!r}, file holds {instance.name!r}"
        )
    return [Selection(tuple(sol["choices"])) for sol in report["solutions"]]


def cmd_stats(args: argparse.Namespace) -> int:
    report = lut_io.parse_report(_read(args.report))
    instance = _load_instance(args.instance)
    if args.top < 1:
        raise ValueError("--top must be >= 1")
    selections = _selections_from_report(report, instance)[: args.top]
    hist = analysis.selection_histogram(instance, selections)
    lines = [["op_id", "count", "fraction"]]
    for op_id, count in sorted(hist.counts.items(), key=lambda kv: (-kv[1], kv[0])):
        lines.append([op_id, str(count), repr(count / hist.total_slots)])
    _write_csv(args.out, lines)
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    report = lut_io.parse_report(_read(args.report))
    instance = _load_instance(args.instance)
    selections = _selections_from_report(report, instance)
    measured: list[float] | None = None
    if args.measured is not None:
        m_name, entries = lut_io.parse_measured_scores(_read(args.measured))
        if m_name != instance.name:
            raise ValueError(
                f"measured scores are for instance {m_name!r}, file holds {instance.name!r}"
            )
        by_choices = {sel.choices: score for sel, score in entries}
        measured = []
        for sel in selections:
            if sel.choices not in by_choices:
                raise ValueError(f"no measured score for selection {list(sel.choices)}")
            measured.append(by_choices[sel.choices])
    ranked = analysis.rank_candidates(instance, selections, measured)
    lines = [["rank", "choices", "proxy_objective", "measured", "cost_ms"]]
    for rank, entry in enumerate(ranked.entries):
        lines.append([
            str(rank),
            " ".join(str(c) for c in entry.selection.choices),
            repr(entry.proxy_objective),
            "" if entry.measured is None else repr(entry.measured),
            repr(core_cost(instance, entry.selection)),
        ])
    _write_csv(args.out, lines)
    if measured is not None:
        proxies = [e.proxy_objective for e in ranked.entries]
        scores = [e.measured for e in ranked.entries]
        print(f"kendall_tau={analysis.kendall_tau(proxies, scores)!r}")
    return 0


def cmd_random(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    budget = budget_from_ratio(instance, args.budget_ratio)
    result = baselines.random_search(
        instance, budget, n_samples=args.n,
        config=baselines.SamplerConfig(seed=args.seed),
    )
    lines = [["sample_index", "objective", "cost_ms"]]
    for rec in result.records:
        lines.append([str(rec.sample_index), repr(rec.objective), repr(rec.cost_ms)])
    _write_csv(args.out, lines)
    cfg = solver.SolverConfig(threads=args.threads if args.threads is not None else _default_threads())
    ilp = solver.solve(instance, budget, config=cfg)
    random_min = min(result.population)
    print(
        f"random_min={random_min!r} ilp_objective={ilp.objective!r} "
        f"ilp_status={ilp.status} failures={result.failures}"
    )
    return 0


def cmd_zeroshot(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    missing = [
        layer.layer_index
        for layer in instance.layers
        if not any(op.op_id == args.identity_id for op in layer.ops)
    ]
    if missing and not args.allow_missing_identity:
        raise ValueError(
            f"no {args.identity_id!r} op at layers {missing}; "
            f"pass --allow-missing-identity to keep those layers teacher-only"
        )
    teacher_ops = {id(layer.teacher_op) for layer in instance.layers}
    restricted = lut_io.restrict_pool(
        instance,
        lambda op: id(op) in teacher_ops or op.op_id == args.identity_id,
    )
    return _run_solve(restricted, _budget_for(restricted, args), args)


_COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "stats": cmd_stats,
    "rank": cmd_rank,
    "random": cmd_random,
    "zeroshot": cmd_zeroshot,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except baselines.SamplingError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
