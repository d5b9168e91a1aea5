"""Fit Weyl rates reproducing each MUB dephasing channel, prime n.

Each single-basis MUB generator is expanded in single-label Weyl generators
by least squares; the fit is exact and puts rate 2/n on the n - 1 labels
whose operators the basis diagonalizes.
"""

import argparse

import numpy as np

from qudit_decoherence.generators import (find_mub_weyl_rate_map, mub_line,
                                          predicted_rate_map)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", default="2,3,5,7")
    ap.add_argument("--show", type=int, default=3, help="print the map for this n")
    args = ap.parse_args()

    for n in map(int, args.dims.split(",")):
        rmap = find_mub_weyl_rate_map(n)
        dev = np.max(np.abs(rmap.matrix - predicted_rate_map(n)))
        print(f"n={n}: fit residual {rmap.residual:.1e}, deviation from 2/n-on-line {dev:.1e}")
        if n == args.show:
            for a in range(n + 1):
                print(f"  basis {a}: labels {mub_line(n, a)}")


if __name__ == "__main__":
    main()
