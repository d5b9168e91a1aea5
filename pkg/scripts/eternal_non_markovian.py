"""Divisibility scan of a qubit whose z-rate turns negative.

With gamma_x = gamma_y = 1 and gamma_z = -c tanh(t) the map stays
P-divisible for c = 1 while losing CP-divisibility; larger c breaks both.
"""

import argparse

import numpy as np

from qudit_decoherence.divisibility import divisibility_report
from qudit_decoherence.dynamics import pauli_pi_from_gamma
from qudit_decoherence.generators import make_spec
from qudit_decoherence.noise_bases import gell_mann, pauli_strings
from qudit_decoherence.rates import RateSchedule


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--amplitudes", default="0.5,1,1.5,2")
    ap.add_argument("--t-max", type=float, default=3.0)
    ap.add_argument("--steps", type=int, default=60)
    args = ap.parse_args()

    grid = np.linspace(0, args.t_max, args.steps + 1)
    print(f"{'c':>5} {'CP pairs':>9} {'P pairs':>8} {'min Choi':>10} {'max dTN/dt':>11} "
          f"{'Kraus >= 0':>10}")
    for c in map(float, args.amplitudes.split(",")):
        presets = ["0", "1", "1", f"neg-tanh(1,{c})"]
        rep = divisibility_report(
            make_spec(gell_mann(2), RateSchedule.from_presets(gell_mann(2).labels, presets)), grid)
        pw = pauli_pi_from_gamma(RateSchedule.from_presets(pauli_strings(1).labels, presets), grid)
        n = len(rep.pairs)
        print(f"{c:5.2f} {int(rep.cp_ok.sum()):4d}/{n:<4d} {int(rep.p_ok.sum()):3d}/{n:<4d} "
              f"{rep.min_choi_eig.min():10.3e} {rep.max_tn_deriv.max():11.3e} "
              f"{str(bool(pw.cp.all())):>10}")


if __name__ == "__main__":
    main()
