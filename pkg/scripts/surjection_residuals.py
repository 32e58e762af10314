#!/usr/bin/env python3
"""Residual-decay experiment for the standard surjection.

Builds the (n+2)-variable surjection at the requested depth, runs
randomized preimage reconstructions, and writes the residual-vs-step
table as TSV (plus a JSON report).  Typical run:

    python scripts/surjection_residuals.py --n 1 --depth 21 --trials 25 \
        --seed 0 --out runs/n1
"""

import argparse
import os
import sys

from ultrametrica import io as uio
from ultrametrica.cli import Config, run_surjection_trials
from ultrametrica.valuegroup import FreeRadius, make_profile

SQUAREFREE = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--depth", type=int, default=21)
    ap.add_argument("--trials", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--floor", default="12")
    ap.add_argument("--max-denom-log", type=int, default=110)
    ap.add_argument("--out", default=None, help="output prefix")
    args = ap.parse_args()

    radii = [FreeRadius(SQUAREFREE[i]) for i in range(args.n)]
    profile = make_profile(args.p, radii, max_denom_log=args.max_denom_log)
    config = Config(
        profile=profile,
        depth=args.depth,
        floor_exponent=uio.frac_from_str(args.floor),
        seed=args.seed,
        trials=args.trials,
    )
    report, rows = run_surjection_trials(config, args.trials, args.depth, args.seed)
    print(
        f"n={args.n} depth={args.depth} trials={args.trials}: "
        f"{report['passes']} pass, {report['failures']} fail, "
        f"{report['wall_clock_s']}s"
    )
    if args.out:
        os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
        uio.dump_json(report, args.out + ".report.json")
        with open(args.out + ".residuals.tsv", "w") as fh:
            fh.write("trial\tstep\tresidual_weight\n")
            for t, s, w in rows:
                fh.write(f"{t}\t{s}\t{w}\n")
        print(f"wrote {args.out}.report.json and {args.out}.residuals.tsv")
    else:
        for t, s, w in rows[:24]:
            print(f"{t}\t{s}\t{w}")
    return 0 if report["failures"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
