"""CP- and P-divisibility tests for computed dynamical maps.

P-divisibility is only ever falsified: a finite probe set can exhibit a
trace-norm increase but never certify its absence, so a passing flag reads
as "no violation found".
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import check_grid, evolve_propagator, propagator_slice
from .generators import (DOUBLE_COMMUTATOR, MUB_DEPHASING, PreconditionError,
                         gm_special_eigenvalues, mub_eigenvalues,
                         pauli_eigenvalues, weyl_eigenvalues)
from .noise_bases import GELL_MANN, PAULI_STRING, WEYL, mub_differences
from .operator_core import (min_choi_eigenvalue, random_hermitian,
                            trace_norms, unvec, vec)

CHOI_TOL = 1e-9
DERIV_TOL = 1e-7
EIG_TOL = 1e-10


class UnsupportedForm(ValueError):
    pass


def pair_grid(n_times, k):
    """All pairs ``(i, j)``, ``i < j``, among ``k + 1`` evenly spaced indices."""
    if n_times < 2:
        raise ValueError("need at least two grid points to form pairs")
    idx = np.unique(np.round(np.linspace(0, n_times - 1, k + 1)).astype(int))
    return [(int(i), int(j)) for a, i in enumerate(idx) for j in idx[a + 1:]]


def rate_sign_ok(spec, times):
    """Per time: all non-identity rates non-negative."""
    skip = None if spec.form == MUB_DEPHASING else 0
    out = []
    for t in times:
        r = spec.rates(t)
        if skip is not None:
            r = r[1:]
        out.append(bool(np.all(r >= 0)))
    return np.array(out)


def check_cp_divisible(propagators, pairs, tol=CHOI_TOL):
    """Minimal Choi eigenvalue of ``V(t, s)`` for every ``(s, t)`` index pair."""
    out = []
    for i, j in pairs:
        V, _ = propagator_slice(propagators[j], propagators[i])
        lam = min_choi_eigenvalue(V)
        out.append((lam >= -tol, lam))
    return out


def default_probes(spec, count=50, seed=0):
    """Family eigenoperators (Hermitian parts) plus random Hermitian operators."""
    fam = spec.family
    n = fam.dim
    if spec.form == MUB_DEPHASING:
        _, ops = mub_differences(fam)
    else:
        ops = []
        for A in fam.ops[1:]:
            for H in ((A + A.conj().T) / 2, (A - A.conj().T) / 2j):
                if np.linalg.norm(H) > 1e-12:
                    ops.append(H)
        ops = np.array(ops)
    rng = np.random.default_rng(seed)
    rand = np.array([random_hermitian(n, rng) for _ in range(count)])
    return np.concatenate([ops, rand]) if count else ops


def check_p_divisible(propagators, times, pairs, probes, tol=DERIV_TOL):
    """Largest trace-norm growth rate of ``V(t, s)`` over the probe set.

    For each pair the rate is ``(||V(t,s) Y||_1 - ||Y||_1) / (t - s)``, the
    finite-difference form of ``d/dt ||Lambda(t) X||_1 <= 0`` with
    ``X = Lambda(s)^-1 Y``.  A CP (hence positive, trace-preserving) slice
    contracts the trace norm, so CP implies a passing flag here.
    """
    if len(times) < 3:
        raise ValueError("P-divisibility check needs at least 3 grid points")
    probes = np.asarray(probes)
    base = trace_norms(probes)
    Y = vec(probes).T
    out = []
    for i, j in pairs:
        V, _ = propagator_slice(propagators[j], propagators[i])
        grown = trace_norms(unvec((V @ Y).T))
        rate = float(np.max((grown - base) / (times[j] - times[i])))
        out.append((rate <= tol, rate))
    return out


def trace_norm_derivatives(propagators, times, X):
    """Central-difference ``d/dt ||Lambda(t)[X]||_1`` on the trajectory grid.

    Returns ``(norms, derivs)``; the end points use one-sided stencils.
    """
    norms = trace_norms(unvec(propagators @ vec(X)))
    return norms, np.gradient(norms, times)


def check_eigenvalue_sign(spec, grid, tol=EIG_TOL):
    """Per time: closed-form generator eigenvalues have real part ``<= tol``.

    Supported forms are the ones with known eigenoperators: Gell-Mann with
    uniform ``gamma^S + gamma^A``, Weyl (complex spectrum unless the rates
    are symmetric under ``j -> -j``), Pauli strings and MUB dephasing.
    """
    fam = spec.family
    flags, spectra = [], []
    for t in grid:
        try:
            if spec.form == MUB_DEPHASING:
                ev = mub_eigenvalues(spec, t)
            elif fam.kind == GELL_MANN and spec.form == DOUBLE_COMMUTATOR:
                ev = gm_special_eigenvalues(spec, t)
            elif fam.kind == WEYL:
                ev = weyl_eigenvalues(spec, t)
            elif fam.kind == PAULI_STRING:
                ev = pauli_eigenvalues(spec, t)
            else:
                raise PreconditionError(f"no closed form for {fam.kind}/{spec.form}")
        except PreconditionError as exc:
            raise UnsupportedForm(f"eigenvalue-sign test unsupported at t = {t}: {exc}") from exc
        vals = np.array(list(ev.values()), dtype=complex)
        spectra.append(vals)
        flags.append(bool(np.all(vals.real <= tol)))
    return np.array(flags), spectra


@dataclass
class DivisibilityReport:
    times: np.ndarray
    pairs: list               # (i, j) grid-index pairs
    min_choi_eig: np.ndarray
    max_tn_deriv: np.ndarray
    cp_ok: np.ndarray
    p_ok: np.ndarray
    rate_sign_ok: np.ndarray  # per time
    eigenvalue_sign_ok: np.ndarray = None  # per time, when a closed form exists

    def rows(self):
        for (i, j), lam, d, cp, p in zip(self.pairs, self.min_choi_eig,
                                         self.max_tn_deriv, self.cp_ok, self.p_ok):
            yield self.times[i], self.times[j], lam, d, bool(cp), bool(p)

    @property
    def cp_implies_p(self):
        return bool(np.all(self.p_ok[self.cp_ok]))


def divisibility_report(spec, grid, n_pairs=10, probes=None, n_random=50, seed=0,
                        substeps=100, propagators=None):
    grid = check_grid(grid)
    if propagators is None:
        propagators = evolve_propagator(spec, grid, substeps)
    pairs = pair_grid(len(grid), n_pairs)
    if probes is None:
        probes = default_probes(spec, n_random, seed)
    cp = check_cp_divisible(propagators, pairs)
    p = check_p_divisible(propagators, grid, pairs, probes)
    try:
        eig_ok, _ = check_eigenvalue_sign(spec, grid)
    except UnsupportedForm:
        eig_ok = None
    report = DivisibilityReport(
        times=grid, pairs=pairs,
        min_choi_eig=np.array([c[1] for c in cp]),
        max_tn_deriv=np.array([d[1] for d in p]),
        cp_ok=np.array([c[0] for c in cp]),
        p_ok=np.array([d[0] for d in p]),
        rate_sign_ok=rate_sign_ok(spec, grid),
        eigenvalue_sign_ok=eig_ok,
    )
    return report
