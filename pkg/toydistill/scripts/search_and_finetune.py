#!/usr/bin/env python3
"""End-to-end experiment: search a compressed student and finetune it.

Runs the pipeline, solves for diverse candidates through the search CLI,
picks the candidate with the lowest plugged-in loss on the train subset,
finetunes it, and compares against random-feasible students finetuned
identically.
"""

import argparse
import json
import statistics
import subprocess
import sys
import tempfile

import toydistill as td
from toydistill.distill import assemble
from toydistill.finetune import FinetuneConfig, assemble_and_finetune
from toydistill.teacher import evaluate


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--scale", choices=("desk", "tiny"), default="desk")
    ap.add_argument("--budget-ratio", type=float, default=0.5)
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--epochs", type=int, default=10)
    ap.add_argument("--n-random", type=int, default=5)
    args = ap.parse_args()

    config = td.tiny_config(args.seed) if args.scale == "tiny" else td.PipelineConfig(seed=args.seed)
    with tempfile.TemporaryDirectory() as tmp:
        instance_path = f"{tmp}/instance.json"
        report_path = f"{tmp}/report.json"
        art = td.run_pipeline(config, instance_path=instance_path)
        print(f"teacher accuracy {art.teacher_accuracy:.3f}")

        subprocess.run(
            ["lana", "solve", instance_path, "--budget-ratio", str(args.budget_ratio),
             "--k", str(args.k), "--time-limit", "10", "--threads", "1",
             "--out", report_path],
            check=True,
        )
        with open(report_path, "r", encoding="utf-8") as fh:
            report = json.load(fh)

        best_loss, best_choices = None, None
        for sol in report["solutions"]:
            student = assemble(art.teacher, art.pool, sol["choices"])
            loss, _ = evaluate(student, art.data.eval_x, art.data.eval_y)
            if best_loss is None or loss < best_loss:
                best_loss, best_choices = loss, sol["choices"]
        print(f"searched candidate {best_choices} (pre-finetune loss {best_loss:.3f})")

        finetune = FinetuneConfig(epochs=args.epochs)
        _, searched_acc = assemble_and_finetune(
            art.teacher, art.pool, best_choices, art.data, finetune, seed=args.seed + 1000
        )
        print(f"searched student accuracy {searched_acc:.3f}")

        budget = args.budget_ratio * td.teacher_lut_cost(art.instance_doc)
        random_accs = []
        for j in range(args.n_random):
            choices = td.sample_feasible_choices(art.instance_doc, budget,
                                                 seed=100 * (args.seed + 1) + j)
            _, acc = assemble_and_finetune(
                art.teacher, art.pool, choices, art.data, finetune, seed=args.seed + 1000
            )
            random_accs.append(acc)
            print(f"random student {j} {choices} accuracy {acc:.3f}")

        print(f"teacher {art.teacher_accuracy:.3f} | searched {searched_acc:.3f} | "
              f"random mean {statistics.mean(random_accs):.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
