"""Time-local GKSL generators built from a noise family and a rate schedule.

Every generator form is reduced to a list of dissipator terms
``(gamma_k, V_k)`` in the normalization

    L[rho] = 1/2 sum_k gamma_k (V_k rho V_k^dag - 1/2 {V_k^dag V_k, rho}),

which the superoperator assembly, the QC/PQ split and the geometric
Fokker-Planck evaluation all share.  The printed operator forms of each
family are kept separately in :func:`apply_generator_direct` so that the
assembly can be checked against them.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .noise_bases import (GELL_MANN, MUB, PAULI_STRING, WEYL, NoiseFamily,
                          mub_projectors, weyl)
from .operator_core import (anticommutator, apply_superop, commutator,
                            conjugation_superop, dagger, identity_superop,
                            left_superop, right_superop)
from .rates import RateSchedule

DISSIPATOR = "dissipator"
DOUBLE_COMMUTATOR = "double-commutator"
CONJUGATION = "conjugation"
MUB_DEPHASING = "mub-dephasing"
FORMS = (DISSIPATOR, DOUBLE_COMMUTATOR, CONJUGATION, MUB_DEPHASING)

DEFAULT_FORM = {
    GELL_MANN: DOUBLE_COMMUTATOR,
    WEYL: CONJUGATION,
    PAULI_STRING: CONJUGATION,
    MUB: MUB_DEPHASING,
}

CONSTRAINT_TOL = 1e-10


class IncompatibleForm(ValueError):
    pass


class PreconditionError(ValueError):
    pass


def rate_labels(family, form):
    """Labels a rate schedule must carry for ``family`` under ``form``."""
    if form == MUB_DEPHASING:
        return tuple(range(family.dim + 1))
    return family.labels


@dataclass(frozen=True)
class GeneratorSpec:
    family: NoiseFamily
    rates: RateSchedule
    form: str = None

    def __post_init__(self):
        if self.form is None:
            object.__setattr__(self, "form", DEFAULT_FORM[self.family.kind])
        if self.form not in FORMS:
            raise IncompatibleForm(f"unknown generator form {self.form!r}")
        if self.form == DOUBLE_COMMUTATOR and not self.family.hermitian:
            raise IncompatibleForm(f"{self.form} needs a Hermitian family, "
                                   f"got {self.family.kind}")
        if self.form == CONJUGATION and not self.family.unitary:
            raise IncompatibleForm(f"{self.form} needs a unitary family, "
                                   f"got {self.family.kind}")
        if (self.form == MUB_DEPHASING) != (self.family.kind == MUB):
            raise IncompatibleForm(f"{self.form} is incompatible with "
                                   f"{self.family.kind}")
        expected = rate_labels(self.family, self.form)
        if tuple(self.rates.labels) != tuple(expected):
            raise ValueError(f"rate labels {self.rates.labels} do not match "
                             f"the {self.form} labels {expected}")

    @property
    def dim(self):
        return self.family.dim

    def rates_at(self, t):
        return self.rates(t)


def make_spec(family, rates, form=None):
    """Convenience constructor accepting constant rates or a schedule."""
    form = DEFAULT_FORM[family.kind] if form is None else form
    if not isinstance(rates, RateSchedule):
        rates = RateSchedule.constant(rate_labels(family, form), rates)
    return GeneratorSpec(family, rates, form)


def dissipator_terms(spec, t):
    """``(gammas, ops)`` of the generator at time t in dissipator normalization.

    The identity element is dropped; MUB dephasing with rate ``gamma_alpha``
    becomes one term of rate ``2 gamma_alpha`` per projector of basis alpha.
    """
    rates = spec.rates(t)
    fam = spec.family
    if spec.form == MUB_DEPHASING:
        gammas = np.array([2 * rates[a] for a, _ in fam.labels])
        return gammas, fam.ops
    keep = [i for i, lab in enumerate(fam.labels) if lab != fam.identity_label]
    return rates[keep], fam.ops[keep]


def assemble_generator(spec, t):
    """Superoperator matrix of L(t)."""
    n = spec.dim
    gammas, ops = dissipator_terms(spec, t)
    L = np.zeros((n * n, n * n), dtype=complex)
    M = np.zeros((n, n), dtype=complex)
    for g, V in zip(gammas, ops):
        if g == 0:
            continue
        L += g * conjugation_superop(V)
        M += g * (dagger(V) @ V)
    L -= 0.5 * (left_superop(M) + right_superop(M))
    return 0.5 * L


def apply_generator_direct(spec, t, rho):
    """Evaluate L(t)[rho] from the family's printed operator expression."""
    rates = spec.rates(t)
    fam = spec.family
    out = np.zeros_like(rho, dtype=complex)
    if spec.form == MUB_DEPHASING:
        for a in range(fam.dim + 1):
            deph = sum(fam[(a, k)] @ rho @ fam[(a, k)] for k in range(fam.dim))
            out += rates[a] * (deph - rho)
        return out
    for g, lab, V in zip(rates, fam.labels, fam.ops):
        if lab == fam.identity_label:
            continue
        if spec.form == DOUBLE_COMMUTATOR:
            out += -0.25 * g * commutator(V, commutator(V, rho))
        elif spec.form == CONJUGATION:
            out += 0.5 * g * (V @ rho @ dagger(V) - rho)
        else:
            VdV = dagger(V) @ V
            out += 0.5 * g * (V @ rho @ dagger(V) - 0.5 * anticommutator(VdV, rho))
    return out


def _comm_superop(A):
    return left_superop(A) - right_superop(A)


def _anti_superop(A):
    return left_superop(A) + right_superop(A)


def qc_pq_split(spec, t):
    """Split L(t) into its double-commutator (QC) and mixed (PQ) parts.

    QC = -1/8 sum gamma ([V^dag,[V, .]] + [V,[V^dag, .]]) and
    PQ = -1/8 sum gamma ([V^dag,{V, .}] - [V,{V^dag, .}]).
    """
    n = spec.dim
    gammas, ops = dissipator_terms(spec, t)
    qc = np.zeros((n * n, n * n), dtype=complex)
    pq = np.zeros_like(qc)
    for g, V in zip(gammas, ops):
        if g == 0:
            continue
        Vd = dagger(V)
        qc += g * (_comm_superop(Vd) @ _comm_superop(V) + _comm_superop(V) @ _comm_superop(Vd))
        pq += g * (_comm_superop(Vd) @ _anti_superop(V) - _comm_superop(V) @ _anti_superop(Vd))
    return -qc / 8, -pq / 8


# ---------------------------------------------------------------------------
# closed-form spectra
# ---------------------------------------------------------------------------

def gm_constraint_gamma(spec, t, tol=CONSTRAINT_TOL):
    """Common value of ``gamma^S + gamma^A`` over all pairs, or raise."""
    if spec.family.kind != GELL_MANN or spec.form not in (DOUBLE_COMMUTATOR, DISSIPATOR):
        raise PreconditionError("closed-form Gell-Mann eigenvalues need the "
                                "Gell-Mann family")
    rates = dict(zip(spec.family.labels, spec.rates(t)))
    n = spec.dim
    sums = np.array([rates[("S", a, b)] + rates[("A", a, b)]
                     for a, b in itertools.combinations(range(n), 2)])
    if np.ptp(sums) > tol:
        raise PreconditionError(
            f"gamma^S + gamma^A is not uniform over pairs (spread {np.ptp(sums):.3e})")
    return float(sums.mean())


def gm_special_eigenvalues(spec, t):
    """Closed-form eigenvalues on the Gell-Mann matrices.

    Valid when ``gamma^S_{k1k2} + gamma^A_{k1k2}`` is the same for every
    pair; returns a dict keyed by family label.
    """
    gamma = gm_constraint_gamma(spec, t)
    rates = dict(zip(spec.family.labels, spec.rates(t)))
    n = spec.dim
    D = {j: rates[("D", j, j)] for j in range(1, n)}
    out = {("D", 0, 0): 0.0}
    for k1, k2 in itertools.combinations(range(n), 2):
        common = -(k1 / (2 * (k1 + 1)) * D[k1] if k1 else 0.0)
        common -= sum(D[j] / (2 * j * (j + 1)) for j in range(k1 + 1, k2))
        common -= (k2 + 1) / (2 * k2) * D[k2]
        common -= gamma * (n - 2) / 2
        out[("S", k1, k2)] = common - rates[("A", k1, k2)]
        out[("A", k1, k2)] = common - rates[("S", k1, k2)]
    for k in range(1, n):
        out[("D", k, k)] = -gamma * n / 2
    return out


def weyl_eigenvalues(spec, t, real_part=False):
    """Eigenvalues of the Weyl generator on ``U_{k1k2}``.

    ``U_j U_k U_j^dag = Omega^{k1 j2 - k2 j1} U_k``, hence
    ``l_k = 1/2 sum_j gamma_j (Omega^{k1 j2 - k2 j1} - 1)``.  With
    ``real_part=True`` the character is replaced by its real part, which is
    exact only for rates symmetric under ``j -> -j``.
    """
    if spec.family.kind != WEYL:
        raise PreconditionError(f"Weyl eigenvalues need the Weyl family, "
                                f"got {spec.family.kind}")
    n = spec.dim
    gam = spec.rates(t)
    J = np.array(spec.family.labels)
    out = {}
    for k1, k2 in spec.family.labels:
        chi = np.exp(2j * np.pi * (k1 * J[:, 1] - k2 * J[:, 0]) / n)
        if real_part:
            chi = chi.real
        out[(k1, k2)] = complex(0.5 * np.sum(gam * (chi - 1)))
    return out


def weyl_rates_symmetric(spec, t, tol=CONSTRAINT_TOL):
    n = spec.dim
    rates = dict(zip(spec.family.labels, spec.rates(t)))
    return all(abs(rates[(a, b)] - rates[((-a) % n, (-b) % n)]) <= tol
               for a, b in rates)


def pauli_sign_matrix(N):
    """``C[a, b] = c`` with ``eta_b eta_a eta_b = c eta_a``; ``C @ C = 4^N``."""
    c1 = np.array([[1 if (i == 0 or j == 0 or i == j) else -1 for j in range(4)]
                   for i in range(4)])
    C = np.array([[1]])
    for _ in range(N):
        C = np.kron(C, c1)
    return C


def pauli_eigenvalues(spec, t):
    if spec.family.kind != PAULI_STRING:
        raise PreconditionError("Pauli eigenvalues need the Pauli-string family")
    N = len(spec.family.labels[0])
    C = pauli_sign_matrix(N)
    gam = spec.rates(t).copy()
    gam[0] = 0.0
    lam = 0.5 * (C - 1) @ gam
    return dict(zip(spec.family.labels, lam))


def mub_eigenvalues(spec, t):
    """Eigenvalue ``-sum_{beta != alpha} gamma_beta`` on each ``Q_k^(alpha)``."""
    if spec.form != MUB_DEPHASING:
        raise PreconditionError("MUB eigenvalues need the MUB dephasing form")
    n = spec.dim
    gam = spec.rates(t)
    return {(a, k): float(gam[a] - gam.sum()) for a in range(n + 1) for k in range(1, n)}


def labeled_eigenvalue(L, X):
    """Rayleigh ratio of L at X and the eigen-residual ``||L X - l X||``."""
    LX = apply_superop(L, X)
    lam = np.vdot(X, LX) / np.vdot(X, X)
    return complex(lam), float(np.max(np.abs(LX - lam * X)))


# ---------------------------------------------------------------------------
# MUB <-> Weyl rate correspondence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateMap:
    """Linear map from MUB basis rates to Weyl rates with its fit residual."""

    weyl_labels: tuple
    matrix: np.ndarray  # shape (n + 1, n * n): row alpha gives Weyl rates
    residual: float

    def weyl_rates(self, mub_rates):
        return np.asarray(mub_rates, dtype=float) @ self.matrix


def find_mub_weyl_rate_map(n):
    """Solve for the Weyl rates reproducing each unit-rate MUB generator.

    Each MUB basis generator is expanded by least squares in the single-label
    Weyl generators; the residual certifies exact representability.
    """
    mub = mub_projectors(n)
    wf = weyl(n)
    W = np.array([0.5 * (conjugation_superop(U) - identity_superop(n)).reshape(-1)
                  for U in wf.ops[1:]]).T
    rows, worst = [], 0.0
    for a in range(n + 1):
        unit = np.zeros(n + 1)
        unit[a] = 1.0
        target = assemble_generator(make_spec(mub, unit), 0.0).reshape(-1)
        c, *_ = np.linalg.lstsq(W, target, rcond=None)
        c = c.real
        worst = max(worst, float(np.max(np.abs(W @ c - target))))
        rows.append(np.concatenate([[0.0], c]))
    return RateMap(wf.labels, np.array(rows), worst)


def mub_line(n, alpha):
    """Weyl labels whose operators are diagonal in MUB basis ``alpha``.

    Basis 0 is the clock line ``(m, 0)``; basis ``b + 1`` diagonalizes the
    powers of ``U_{b,1}``, i.e. the labels ``(m b mod n, m)``.
    """
    if alpha == 0:
        return [(m, 0) for m in range(1, n)]
    b = alpha - 1
    return [((m * b) % n, m) for m in range(1, n)]


def predicted_rate_map(n):
    """Rate ``2/n`` on each label of the basis line, zero elsewhere."""
    labels = weyl(n).labels
    M = np.zeros((n + 1, n * n))
    for a in range(n + 1):
        for lab in mub_line(n, a):
            M[a, labels.index(lab)] = 2.0 / n
    return M
