#!/usr/bin/env python3
"""Run the full pipeline and emit a lookup-table instance file.

    python scripts/run_pipeline.py --out instance.json
    python scripts/run_pipeline.py --scale tiny --out instance.json
    python scripts/run_pipeline.py --config my_config.json --out instance.json

Validate and search the result with the companion CLI:

    lana validate instance.json
    lana solve instance.json --budget-ratio 0.5 --k 20 --out report.json
"""

import argparse
import json
import sys

import toydistill as td


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", default=None, help="JSON pipeline config")
    ap.add_argument("--scale", choices=("desk", "tiny"), default="desk")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True, help="instance file path")
    ap.add_argument("--log", default=None, help="optional run-log JSON path")
    args = ap.parse_args()

    if args.config:
        config = td.load_config(args.config)
    elif args.scale == "tiny":
        config = td.tiny_config(args.seed)
    else:
        config = td.PipelineConfig(seed=args.seed)

    art = td.run_pipeline(config, instance_path=args.out)
    print(f"teacher test accuracy: {art.teacher_accuracy:.3f}")
    print(f"lookup-table teacher total: {art.log['teacher_lut_total_ms']:.3f} ms "
          f"(whole forward {art.log['whole_network_forward_ms']:.3f} ms, "
          f"ratio {art.log['lut_vs_forward_ratio']:.3f})")
    print(f"wrote {args.out}")
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            json.dump(art.log, fh, indent=2)
        print(f"wrote {args.log}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
