#!/usr/bin/env python3
"""Generate a synthetic instance file.

Examples:
    python scripts/make_instance.py --flavor tradeoff -n 20 -m 12 --seed 3 --out inst.json
    python scripts/make_instance.py --flavor zeroshot -n 16 --out zs.json
"""

import argparse
import sys

from lana import synth
from lana.lut_io import write_instance

FLAVORS = {
    "uniform": lambda a: synth.uniform_instance(a.seed, a.n, a.m, tagged=True),
    "tradeoff": lambda a: synth.tradeoff_instance(a.seed, a.n, a.m),
    "zeroshot": lambda a: synth.zero_shot_instance(a.seed, a.n),
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--flavor", choices=sorted(FLAVORS), default="tradeoff")
    ap.add_argument("-n", type=int, default=20, help="layers")
    ap.add_argument("-m", type=int, default=8, help="candidate ops per layer")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    instance = FLAVORS[args.flavor](args)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(write_instance(instance, provenance={"generator": args.flavor, "seed": args.seed}))
    print(f"wrote {args.out}: {instance.name} "
          f"({instance.num_layers} layers, {len(instance.layers[0].ops)} ops/layer)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
