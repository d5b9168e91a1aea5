"""Empirical order of the fixed-step RK4 propagator against expm."""

import argparse

import numpy as np
from scipy.linalg import expm

from qudit_decoherence.generators import assemble_generator, make_spec
from qudit_decoherence.noise_bases import family
from qudit_decoherence.dynamics import evolve_propagator


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="weyl")
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--t", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    fam = family(args.family, args.dim)
    spec = make_spec(fam, np.random.default_rng(args.seed).uniform(0, 1, len(fam)))
    exact = expm(args.t * assemble_generator(spec, 0.0))
    prev = None
    print(f"{'steps/unit':>10} {'max err':>10} {'order':>6}")
    for s in (2, 4, 8, 16, 32, 64):
        err = np.max(np.abs(evolve_propagator(spec, [0, args.t], s)[-1] - exact))
        order = "" if prev is None else f"{np.log2(prev / err):6.2f}"
        print(f"{s:10d} {err:10.2e} {order}")
        prev = err


if __name__ == "__main__":
    main()
