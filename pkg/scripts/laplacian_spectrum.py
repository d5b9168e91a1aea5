"""Check that dipole expectation functions are Laplacian eigenfunctions.

For each n the uniform-weight Gell-Mann Laplacian is applied to every
traceless basis function at random interior points, both through the
operator correspondence and by iterated finite differences.
"""

import argparse

import numpy as np

from qudit_decoherence import geometry as geo
from qudit_decoherence.noise_bases import gell_mann


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", default="2,3,4")
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>2} {'eigenvalue':>10} {'algebraic':>10} {'analytic':>10} {'fd':>10}")
    for n in map(int, args.dims.split(",")):
        fam = gell_mann(n)
        pts = geo.sample_interior(n, args.points, args.seed)
        errs = {}
        for method in ("algebraic", "analytic", "fd"):
            worst = 0.0
            for T in fam.ops[1:]:
                f = geo.KahlerFunction(T)
                lap = geo.laplacian_apply(fam, np.ones(len(fam)), f, pts, method)
                ratio = np.max(np.abs(lap + 4 * n * f(pts))) / (4 * n * np.max(np.abs(f(pts))))
                worst = max(worst, ratio)
            errs[method] = worst
        print(f"{n:2d} {-4 * n:10d} {errs['algebraic']:10.2e} {errs['analytic']:10.2e} "
              f"{errs['fd']:10.2e}")


if __name__ == "__main__":
    main()
