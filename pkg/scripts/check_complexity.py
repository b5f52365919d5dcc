"""Compare brute-force candidate counts with the closed forms and print a table.

    python3 scripts/check_complexity.py --n-max 61 --m 2 3 4 5
"""

import argparse
import sys

from rnaqubo.cli import main


def run() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=41)
    ap.add_argument("--m", type=int, nargs="+", default=[2, 3, 4])
    args = ap.parse_args()
    return main(["complexity", "--n-max", str(args.n_max), "--m", *map(str, args.m)])


if __name__ == "__main__":
    sys.exit(run())
