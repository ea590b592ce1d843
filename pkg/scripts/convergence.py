"""Distance between amoeba and spine along a delta sweep.

    python3 scripts/convergence.py --family cp2:3 --deltas 0.3,0.1,0.03,0.01,0.001
"""
import argparse
import sys

from amoeba_spine.cli import converge_rows, rows_to_csv
from amoeba_spine.config import ConvergeConfig, SamplingOptions, parse_floats


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--family", default="cp2:3")
    ap.add_argument("--deltas", default="0.3,0.1,0.03,0.01,0.001")
    ap.add_argument("--resolution", type=int, default=600)
    args = ap.parse_args()
    cfg = ConvergeConfig(args.family, tuple(parse_floats(args.deltas)), SamplingOptions(resolution=args.resolution))
    sys.stdout.write(rows_to_csv(converge_rows(cfg)))


if __name__ == "__main__":
    main()
