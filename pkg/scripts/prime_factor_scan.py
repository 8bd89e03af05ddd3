#!/usr/bin/env python3
"""Run the largest-prime-factor threshold scan and write rows to CSV.

Usage: python scripts/prime_factor_scan.py --x-bound 2000 --two-n 2 --eps 0.1 \
           [--grh-c C] [--out rows.csv]
"""

import argparse
import sys

from taulab.hecke import EigenformSpec
from taulab.scans import CSV_HEADER, threshold_scan


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--two-n", type=int, default=2)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--grh-c", type=float)
    ap.add_argument("--x-bound", type=int, default=2000)
    ap.add_argument("--trial-bound", type=int, default=10**4)
    ap.add_argument("--rho-budget", type=int, default=3 * 10**5)
    ap.add_argument("--out")
    args = ap.parse_args()

    rows, summary = threshold_scan(
        EigenformSpec.delta(),
        args.two_n,
        args.x_bound,
        epsilon=None if args.grh_c is not None else args.eps,
        grh_c=args.grh_c,
        trial_bound=args.trial_bound,
        rho_budget=args.rho_budget,
    )
    sink = open(args.out, "w") if args.out else sys.stdout
    print(CSV_HEADER, file=sink)
    for row in rows:
        print(row.csv_line(), file=sink)
    if args.out:
        sink.close()
    print(summary.to_json(), file=sys.stderr)


if __name__ == "__main__":
    main()
