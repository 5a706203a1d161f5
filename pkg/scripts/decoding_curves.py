#!/usr/bin/env python3
"""Decoding-probability curves: ps versus eta for both algorithms.

Writes a sweep CSV compatible with the `plot ps_curve` renderer. The
default grid is a desk-scale version of the headline experiments; pass
--large for the n=500 configurations (minutes, not seconds).
"""

import argparse
import math
import sys

from ltcds.cli import SWEEP_HEADER, sweep_rows_to_csv
from ltcds.query import SweepCell, SweepConfig, sweep


def build_config(large: bool, seeds: int, trials: int, master_seed: int) -> SweepConfig:
    if large:
        sizes = [(500, 50), (1000, 100)]
    else:
        sizes = [(100, 10), (200, 20)]
    cells = []
    for n, k in sizes:
        side = math.sqrt(n * 9 / 40)  # constant density 40/9
        for algorithm in ("ltcds1", "ltcds2"):
            cells.append(
                SweepCell(
                    algorithm=algorithm,
                    n=n,
                    k=k,
                    side_length=side,
                    c1=3.0,
                    c2=50,
                    c3=10.0,
                )
            )
    return SweepConfig(
        cells=tuple(cells),
        etas=(1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.25, 2.5),
        trials=trials,
        seeds=seeds,
        master_seed=master_seed,
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="decoding_curves.csv")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--seeds", type=int, default=3, help="independent runs per cell")
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--large", action="store_true")
    args = parser.parse_args()

    config = build_config(args.large, args.seeds, args.trials, args.seed)
    rows = sweep(config, jobs=args.jobs)
    lines = [f"# ltcds decoding-curves master_seed={args.seed}"] + sweep_rows_to_csv(rows)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    print(SWEEP_HEADER)
    for row in rows:
        print(f"{row.algorithm} n={row.n} eta={row.eta:.2f} ps={row.ps:.3f} +/- {row.ci95:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
