#!/usr/bin/env python3
"""Export the normalized-coefficient histogram as CSV for external plotting.

Usage: python scripts/sato_tate_export.py --x-bound 100000 --bins 40 [--out hist.csv]
"""

import argparse
import sys

from taulab.hecke import EigenformSpec
from taulab.scans import sato_tate_histogram


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x-bound", type=int, default=10**5)
    ap.add_argument("--bins", type=int, default=40)
    ap.add_argument("--out")
    args = ap.parse_args()

    hist = sato_tate_histogram(EigenformSpec.delta(), args.x_bound, args.bins)
    sink = open(args.out, "w") if args.out else sys.stdout
    for line in hist.csv_lines():
        print(line, file=sink)
    if args.out:
        sink.close()
    print(f"max bin deviation: {hist.max_deviation:.5f}", file=sys.stderr)


if __name__ == "__main__":
    main()
