"""Geometry of CP^(n-1): Kahler functions, brackets, Laplacians, Fokker-Planck.

Points are stored in action-angle coordinates ``mu_i = N_i^2`` and ``nu_i``
(``i = 1..n-1``, ``mu_0 = 1 - sum mu_i``).  There the symplectic form is
``omega = 1/2 sum d mu_i ^ d nu_i`` and, with ``df = omega(X_f, .)``,

    X_f = 2 sum_i (df/dnu_i d/dmu_i - df/dmu_i d/dnu_i),
    {f, g} = omega(X_f, X_g) = 2 sum_i (df/dmu_i dg/dnu_i - df/dnu_i dg/dmu_i).

The Fubini-Study metric reads
``g = sum_{i>=0} d mu_i^2 / (4 mu_i) + sum mu_i d nu_i^2 - (sum mu_i d nu_i)^2``.

With these conventions ``{f_A, f_B} = f_C`` for ``C = -2i[A, B]`` and
``g(X_A, X_B) + 4 f_A f_B = f_D`` for ``D = 2(AB + BA)``; every operator
identity below rests on those two correspondences, and each quantity also
has a finite-difference path that uses only the coordinates.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .generators import dissipator_terms
from .noise_bases import expand
from .operator_core import anticommutator, commutator, dagger

EPS = 1e-6          # interior margin
H1 = 1e-5           # first-derivative step
H2 = 1e-4           # outer step of iterated derivatives
MC_CHUNK = 8192


class ChartBoundaryError(ValueError):
    pass


def volume(n):
    """Liouville volume ``pi^(n-1) / (n-1)!`` of CP^(n-1)."""
    return math.pi ** (n - 1) / math.factorial(n - 1)


def normalization(n):
    return n / volume(n)


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectivePoint:
    """A point (or a batch, along leading axes) of CP^(n-1)."""

    mu: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float))
        if self.mu.shape != self.nu.shape:
            raise ValueError("mu and nu must have the same shape")

    @property
    def n(self):
        return self.mu.shape[-1] + 1

    @property
    def mu0(self):
        return 1.0 - self.mu.sum(axis=-1)

    def __len__(self):
        return self.mu.shape[0] if self.mu.ndim > 1 else 1

    def __getitem__(self, i):
        return ProjectivePoint(self.mu[i], self.nu[i])

    def all_mu(self):
        return np.concatenate([self.mu0[..., None], self.mu], axis=-1)

    def vector(self):
        """Normalized representative ``(N_0, N_1 e^{i nu_1}, ...)``."""
        amp = np.sqrt(np.clip(self.all_mu(), 0.0, None))
        phase = np.concatenate([np.zeros(self.nu.shape[:-1] + (1,)), self.nu], axis=-1)
        return amp * np.exp(1j * phase)

    @classmethod
    def from_vector(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi, axis=-1, keepdims=True)
        mu = np.abs(psi[..., 1:]) ** 2
        nu = np.mod(np.angle(psi[..., 1:]) - np.angle(psi[..., :1]), 2 * np.pi)
        return cls(mu, nu)

    @classmethod
    def from_angles(cls, theta, nu):
        """Octant chart: ``theta_i`` in [0, pi/2] per the hyperspherical layout."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        n = len(theta) + 1
        N = np.empty(n)
        N[0] = math.cos(theta[0])
        N[1] = math.sin(theta[0])
        for k in range(2, n):
            N[k] = math.cos(theta[k - 1])
            N[:k] *= math.sin(theta[k - 1])
        return cls(N[1:] ** 2, nu)

    def angles(self):
        N = np.sqrt(np.clip(self.all_mu(), 0.0, None))
        n = len(N)
        theta = np.empty(n - 1)
        r = 1.0
        for k in range(n - 1, 1, -1):
            theta[k - 1] = math.acos(min(1.0, N[k] / r)) if r > 0 else 0.0
            r *= math.sin(theta[k - 1])
        theta[0] = math.atan2(N[1], N[0])
        return theta, self.nu.copy()

    def margin(self):
        m = self.all_mu()
        return np.minimum(m.min(axis=-1), 1.0 - m.max(axis=-1))

    def require_interior(self, eps=EPS):
        if np.any(self.margin() <= eps):
            raise ChartBoundaryError(
                f"point within {eps:g} of the octant chart boundary")

    def shifted(self, dmu, dnu):
        return ProjectivePoint(self.mu + dmu, self.nu + dnu)


def sample_uniform(n, count, seed=0):
    """I.i.d. points from the Liouville measure.

    In action-angle coordinates the measure is flat: ``mu`` uniform on the
    simplex, ``nu`` uniform on the torus.  Samples are drawn in fixed-size
    chunks, each from its own child of ``SeedSequence(seed)``, so the stream
    does not depend on how chunks are later distributed over workers.
    """
    chunks = []
    n_chunks = -(-count // MC_CHUNK)
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(n_chunks)):
        m = min(MC_CHUNK, count - i * MC_CHUNK)
        chunks.append(_sample_chunk(n, m, ss))
    mu = np.concatenate([c[0] for c in chunks])
    nu = np.concatenate([c[1] for c in chunks])
    return ProjectivePoint(mu, nu)


def _sample_chunk(n, m, ss):
    rng = np.random.default_rng(ss)
    e = rng.exponential(size=(m, n))
    mu = e / e.sum(axis=1, keepdims=True)
    nu = rng.uniform(0.0, 2 * np.pi, size=(m, n - 1))
    return mu[:, 1:], nu


def sample_interior(n, count, seed=0, margin=0.02):
    """Uniform samples restricted to ``min mu_i > margin`` (rejection)."""
    rng = np.random.default_rng(seed)
    mus, nus, got = [], [], 0
    while got < count:
        e = rng.exponential(size=(4 * count, n))
        mu = e / e.sum(axis=1, keepdims=True)
        keep = mu.min(axis=1) > margin
        mus.append(mu[keep, 1:])
        nus.append(rng.uniform(0.0, 2 * np.pi, size=(int(keep.sum()), n - 1)))
        got += int(keep.sum())
    return ProjectivePoint(np.concatenate(mus)[:count], np.concatenate(nus)[:count])


def _workers():
    try:
        return max(1, int(os.environ.get("QUDIT_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


def mc_integrate(func, n, count=100_000, seed=0):
    """Monte Carlo ``int func omega`` over CP^(n-1).

    Returns ``(estimate, standard_error)``.  Chunks are evaluated in a thread
    pool capped by ``QUDIT_THREADS``; the result is independent of the pool
    size.
    """
    n_chunks = -(-count // MC_CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(MC_CHUNK, count - i * MC_CHUNK) for i in range(n_chunks)]

    def work(args):
        m, ss = args
        mu, nu = _sample_chunk(n, m, ss)
        vals = np.real(func(ProjectivePoint(mu, nu)))
        return vals.sum(), (vals ** 2).sum()

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        parts = list(pool.map(work, zip(sizes, seeds)))
    s = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s / count
    var = max(s2 / count - mean ** 2, 0.0)
    vol = volume(n)
    return vol * mean, vol * math.sqrt(var / count)


# ---------------------------------------------------------------------------
# Kahler functions and distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KahlerFunction:
    """Expectation-value function ``f_A([psi]) = <psi|A|psi> / <psi|psi>``."""

    op: np.ndarray

    def __post_init__(self):
        op = np.asarray(self.op, dtype=complex)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "_hermitian",
                           bool(np.max(np.abs(op - dagger(op)), initial=0.0) <= 1e-12))

    @property
    def hermitian(self):
        return self._hermitian

    def __call__(self, pt):
        psi = pt.vector()
        val = np.einsum("...i,ij,...j->...", psi.conj(), self.op, psi)
        return val.real if self.hermitian else val

    def __add__(self, other):
        return KahlerFunction(self.op + other.op)

    def __sub__(self, other):
        return KahlerFunction(self.op - other.op)

    def __mul__(self, c):
        return KahlerFunction(c * self.op)

    __rmul__ = __mul__

    def gradient(self, pt):
        """Analytic ``(df/dmu, df/dnu)`` at ``pt``."""
        psi = pt.vector()
        Apsi = psi @ self.op.T
        Adpsi = psi.conj() @ self.op        # row vector psi^dag A
        m = pt.mu
        root0 = np.sqrt(pt.mu0)[..., None]
        # d psi / d mu_i: -1/(2 N_0) on component 0, e^{i nu_i}/(2 N_i) on i
        d0 = -0.5 / root0
        di = 0.5 * np.exp(1j * pt.nu) / np.sqrt(m)
        dmu = (np.conj(d0) * Apsi[..., :1] + np.conj(di) * Apsi[..., 1:]
               + Adpsi[..., :1] * d0 + Adpsi[..., 1:] * di)
        # d psi / d nu_i = i psi_i on component i
        dpsi = 1j * psi[..., 1:]
        dnu = np.conj(dpsi) * Apsi[..., 1:] + Adpsi[..., 1:] * dpsi
        if self.hermitian:
            return dmu.real, dnu.real
        return dmu, dnu


def fd_gradient(func, pt, h=H1):
    """Central-difference ``(df/dmu, df/dnu)`` of any pointwise function."""
    k = pt.n - 1
    dmu, dnu = [], []
    for i in range(k):
        e = np.zeros(k)
        e[i] = h
        dmu.append((func(pt.shifted(e, 0)) - func(pt.shifted(-e, 0))) / (2 * h))
        dnu.append((func(pt.shifted(0, e)) - func(pt.shifted(0, -e))) / (2 * h))
    return np.stack(dmu, axis=-1), np.stack(dnu, axis=-1)


def _grad(f, pt, method):
    if method == "analytic" and isinstance(f, KahlerFunction):
        return f.gradient(pt)
    return fd_gradient(f, pt)


@dataclass(frozen=True)
class QuantumDistribution:
    """``p([psi]) = n!/pi^(n-1) <psi|rho|psi>``, a probability density on CP^(n-1).

    The prefactor is ``n / Vol``: the uniform average of ``<psi|rho|psi>`` is
    ``tr(rho) / n``, so this is the constant giving ``int p omega = 1``.
    """

    rho: np.ndarray

    @property
    def n(self):
        return len(self.rho)

    @property
    def scale(self):
        return normalization(self.n)

    @property
    def kahler(self):
        return KahlerFunction(self.scale * np.asarray(self.rho))

    def __call__(self, pt):
        return self.kahler(pt)

    def purity(self):
        return float(np.real(np.trace(self.rho @ self.rho)))

    def is_pure(self, tol=1e-10):
        return abs(self.purity() - 1.0) <= tol

    def max_value(self):
        """Largest value of p: scale times the top eigenvalue of rho."""
        return self.scale * float(np.linalg.eigvalsh(self.rho).max())


# ---------------------------------------------------------------------------
# vector fields and brackets
# ---------------------------------------------------------------------------

def hamiltonian_vector_field(f, pt, method="analytic", eps=EPS):
    """Components ``(X^mu, X^nu)`` of ``X_f`` at ``pt``."""
    pt.require_interior(eps if method == "analytic" else eps + H1)
    dmu, dnu = _grad(f, pt, method)
    return 2 * dnu, -2 * dmu


def apply_vector_field(X, h, pt, step=H2):
    """Directional derivative ``X(h)`` at ``pt`` by central differences."""
    Xmu, Xnu = X
    scale = np.sqrt(np.sum(np.abs(Xmu) ** 2 + np.abs(Xnu) ** 2, axis=-1))
    scale = np.where(scale > 0, scale, 1.0)
    eps = (step / scale)[..., None]
    # complex fields act through their real and imaginary parts
    if np.iscomplexobj(Xmu) or np.iscomplexobj(Xnu):
        re = apply_vector_field((np.real(Xmu), np.real(Xnu)), h, pt, step)
        im = apply_vector_field((np.imag(Xmu), np.imag(Xnu)), h, pt, step)
        return re + 1j * im
    plus = h(pt.shifted(eps * Xmu, eps * Xnu))
    minus = h(pt.shifted(-eps * Xmu, -eps * Xnu))
    return (plus - minus) / (2 * eps[..., 0])


def poisson_bracket(f, g):
    """Kahler function of ``{f_A, f_B}``: the operator ``-2i[A, B]``."""
    return KahlerFunction(-2j * commutator(f.op, g.op))


def symmetric_bracket(f, g):
    """Kahler function of ``{f_A, f_B}_+``: the operator ``2(AB + BA)``."""
    return KahlerFunction(2 * anticommutator(f.op, g.op))


def metric_part(f, g, pt):
    """``g(X_f, X_g) = {f, g}_+ - 4 f g`` from the operator correspondence."""
    return symmetric_bracket(f, g)(pt) - 4 * f(pt) * g(pt)


def omega(X, Y):
    return 0.5 * np.sum(X[0] * Y[1] - X[1] * Y[0], axis=-1)


def fubini_study(X, Y, pt):
    """Metric ``g(X, Y)`` in action-angle coordinates (bilinear)."""
    m = pt.mu
    m0 = pt.mu0
    g_mumu = np.sum(X[0] * Y[0] / (4 * m), axis=-1) \
        + np.sum(X[0], axis=-1) * np.sum(Y[0], axis=-1) / (4 * m0)
    g_nunu = np.sum(m * X[1] * Y[1], axis=-1) \
        - np.sum(m * X[1], axis=-1) * np.sum(m * Y[1], axis=-1)
    return g_mumu + g_nunu


def poisson_bracket_fd(f, g, pt, method="fd"):
    return omega(hamiltonian_vector_field(f, pt, method),
                 hamiltonian_vector_field(g, pt, method))


def metric_part_fd(f, g, pt, method="fd"):
    return fubini_study(hamiltonian_vector_field(f, pt, method),
                        hamiltonian_vector_field(g, pt, method), pt)


def symmetric_bracket_fd(f, g, pt, method="fd"):
    return metric_part_fd(f, g, pt, method) + 4 * f(pt) * g(pt)


# ---------------------------------------------------------------------------
# Laplacians
# ---------------------------------------------------------------------------

def generalized_laplacian(ops, weights, f, pt, method="algebraic"):
    """``Delta_w f = 1/4 sum_k w_k X_{f_k}^2 f`` for Hermitian ``ops``.

    ``algebraic`` uses ``X_{f_k}^2 f_A = -4 f_{[T_k,[T_k,A]]}``; ``fd`` and
    ``analytic`` iterate vector fields numerically (``analytic`` only takes
    the inner gradients in closed form).
    """
    if method == "algebraic":
        A = np.asarray(f.op)
        D = sum(w * commutator(T, commutator(T, A)) for w, T in zip(weights, ops))
        return -KahlerFunction(D)(pt)
    pt.require_interior(EPS + H1 + H2)
    total = 0.0
    for w, T in zip(weights, ops):
        if w == 0:
            continue
        fk = KahlerFunction(T)
        Xk = hamiltonian_vector_field(fk, pt, method)

        def Xk_f(q, fk=fk):
            Xq = hamiltonian_vector_field(fk, q, method)
            dmu, dnu = _grad(f, q, method)
            return np.sum(Xq[0] * dmu + Xq[1] * dnu, axis=-1)

        total = total + w * apply_vector_field(Xk, Xk_f, pt)
    return total / 4


def laplacian_apply(family, weights, f, pt, method="algebraic"):
    if not family.hermitian:
        raise ValueError(f"generalized Laplacian needs a Hermitian family, got {family.kind}")
    return generalized_laplacian(family.ops, weights, f, pt, method)


def mub_box_operator(fam, alpha, f, pt, method="algebraic"):
    """``box_alpha f = 1/4 sum_k X_{q_k}^2 f`` over the projectors of basis alpha."""
    if not 0 <= alpha <= fam.dim:
        raise IndexError(f"basis index {alpha} out of range 0..{fam.dim}")
    ops = [fam[(alpha, k)] for k in range(fam.dim)]
    return generalized_laplacian(ops, np.ones(fam.dim), f, pt, method)


# ---------------------------------------------------------------------------
# Fokker-Planck generator
# ---------------------------------------------------------------------------

def _hermitian_parts(V):
    return (V + dagger(V)) / 2, (V - dagger(V)) / 2j


def _fp_terms(gammas, ops, rho, pt, method):
    """``1/16 sum gamma (|X_v|^2 p + Im X_v {v*, p}_+)`` split as (QC, PQ).

    With ``v = a + i b``: ``|X_v|^2 = X_a^2 + X_b^2`` and
    ``Im X_v {v*, p}_+ = X_b {a, p}_+ - X_a {b, p}_+``.
    """
    p = QuantumDistribution(rho)
    P = p.kahler
    qc = 0.0
    pq = 0.0
    for g, V in zip(gammas, ops):
        if g == 0:
            continue
        A, B = _hermitian_parts(V)
        fa, fb = KahlerFunction(A), KahlerFunction(B)
        if method == "algebraic":
            R = P.op
            q = -4 * KahlerFunction(commutator(A, commutator(A, R))
                                    + commutator(B, commutator(B, R)))(pt)
            # X_a(f_H) = f_{2i[A, H]},  {b, p}_+ = f_{2{B, R}}
            s = KahlerFunction(2j * commutator(B, 2 * anticommutator(A, R))
                               - 2j * commutator(A, 2 * anticommutator(B, R)))(pt)
        else:
            q = 0.0
            for h in (fa, fb):
                if np.linalg.norm(h.op) < 1e-14:
                    continue
                Xh = hamiltonian_vector_field(h, pt, method)
                q = q + apply_vector_field(
                    Xh, lambda x, h=h: np.sum(
                        np.stack(hamiltonian_vector_field(h, x, method)) *
                        np.stack(_grad(P, x, method)), axis=(0, -1)), pt)
            s = 0.0
            if np.linalg.norm(A) > 1e-14 and np.linalg.norm(B) > 1e-14:
                sym = lambda u: (lambda x: symmetric_bracket_fd(u, P, x, method))
                s = (apply_vector_field(hamiltonian_vector_field(fb, pt, method), sym(fa), pt)
                     - apply_vector_field(hamiltonian_vector_field(fa, pt, method), sym(fb), pt))
        qc = qc + g * q / 16
        pq = pq + g * s / 16
    return np.real(qc), np.real(pq)


def fp_generator_apply(spec, p, pt, t, method="algebraic"):
    """``l(t)[p]`` at ``pt``; returns ``(total, qc, pq)``.

    ``method`` is ``algebraic`` (bracket/operator correspondences), ``fd``
    (pure finite differences in coordinates) or ``analytic`` (closed-form
    first derivatives, finite-difference outer derivatives).
    """
    rho = p.rho if isinstance(p, QuantumDistribution) else np.asarray(p)
    if method != "algebraic":
        pt.require_interior(EPS + 2 * H1 + H2)
    gammas, ops = dissipator_terms(spec, t)
    qc, pq = _fp_terms(gammas, ops, rho, pt, method)
    return qc + pq, qc, pq


def kraus_geometric_residual(ch, p0, pt, method="algebraic"):
    """``|p(t) - p(0) - 1/8 sum pi_k (|X_a|^2 p0 + Im X_a {a*, p0}_+)|``.

    ``p(t)`` comes from applying the channel to ``rho(0)`` algebraically.
    """
    from .dynamics import apply_kraus
    rho0 = p0.rho if isinstance(p0, QuantumDistribution) else np.asarray(p0)
    if method != "algebraic":
        pt.require_interior(EPS + 2 * H1 + H2)
    lhs = QuantumDistribution(apply_kraus(ch, rho0))(pt) - QuantumDistribution(rho0)(pt)
    qc, pq = _fp_terms(2 * ch.weights, ch.family.ops, rho0, pt, method)
    return np.abs(lhs - (qc + pq))


def dipole_residual(op, family):
    """Residual of ``op`` outside the traceless span of the family."""
    ops = [A for A in family.ops if abs(np.trace(A)) < 1e-12]
    _, res = expand(ops, op)
    return max(res, abs(np.trace(op)))
