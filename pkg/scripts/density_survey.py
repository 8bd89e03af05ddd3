#!/usr/bin/env python3
"""Survey trace-zero densities over a (q, ell) grid and print a table.

Usage: python scripts/density_survey.py [--qs 3,5,7] [--ells 2,3,5,7,11,13]
                                        [--level-two] [--k 12]
"""

import argparse
from fractions import Fraction

from taulab.density import DensityQuery, enumerate_density, lift_factor


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qs", default="3,5,7")
    ap.add_argument("--ells", default="2,3,5,7,11,13")
    ap.add_argument("--k", type=int, default=12)
    ap.add_argument("--level-two", action="store_true",
                    help="also enumerate mod ell^2 and print the lift ratio")
    args = ap.parse_args()

    qs = [int(x) for x in args.qs.split(",")]
    ells = [int(x) for x in args.ells.split(",")]

    header = f"{'q':>3} {'ell':>4} {'delta':>10} {'closed':>10} {'agrees':>7}"
    if args.level_two:
        header += f" {'delta(l^2)':>12} {'ratio':>8}"
    print(header)
    for q in qs:
        for ell in ells:
            report = enumerate_density(DensityQuery(q, ell, 1, args.k))
            closed = report.closed_form
            line = (
                f"{q:>3} {ell:>4} {str(report.delta):>10} "
                f"{str(closed) if closed is not None else '-':>10} {str(report.agrees):>7}"
            )
            if args.level_two:
                try:
                    lifted = lift_factor(q, ell, args.k, budget=3 * 10**8)
                    ratio = lifted.ratio
                    line += f" {str(lifted.lifted.delta):>12} {str(ratio) if ratio is not None else '-':>8}"
                except Exception as exc:  # budget or degenerate cases
                    line += f" {'-':>12} {'-':>8}"
            flag = " *" if report.exceptional else ""
            print(line + flag)
    print("\n(*) modulus where the built-in form's image is smaller than generic;")
    print("    the density describes the generic shape, not that form's statistics")


if __name__ == "__main__":
    main()
