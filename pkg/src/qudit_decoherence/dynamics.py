"""Master-equation integration, Kraus channels and Pauli-string weights."""

import math
from dataclasses import dataclass, field

import numpy as np

from .generators import assemble_generator, pauli_sign_matrix
from .noise_bases import NoiseFamily
from .operator_core import (check_density_matrix, conjugation_superop,
                            identity_superop, unvec, vec)

DEFAULT_SUBSTEPS = 100  # RK4 steps per unit time
TRACE_TOL = 1e-9
COND_LIMIT = 1e12
NEGATIVE_WEIGHT_TOL = 1e-8


class DivergenceError(ArithmeticError):
    def __init__(self, t, msg="non-finite value during integration"):
        super().__init__(f"{msg} at t = {t:.17g}")
        self.t = t


class NonInvertibleError(np.linalg.LinAlgError):
    pass


def check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1:
        raise ValueError("time grid must be a non-empty 1-d sequence")
    if grid[0] != 0:
        raise ValueError(f"time grid must start at 0, got {grid[0]}")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return grid


def _rk4(L_of_t, y0, grid, substeps):
    """Classical RK4 for ``dy/dt = L(t) y`` sampled on ``grid``."""
    out = [y0]
    y = y0
    for t0, t1 in zip(grid[:-1], grid[1:]):
        m = max(1, math.ceil((t1 - t0) * substeps - 1e-9))
        h = (t1 - t0) / m
        for i in range(m):
            t = t0 + i * h
            La, Lb, Lc = L_of_t(t), L_of_t(t + h / 2), L_of_t(t + h)
            with np.errstate(over="ignore", invalid="ignore"):
                k1 = La @ y
                k2 = Lb @ (y + h / 2 * k1)
                k3 = Lb @ (y + h / 2 * k2)
                k4 = Lc @ (y + h * k3)
                y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(y)):
                raise DivergenceError(t + h)
        out.append(y)
    return out


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    superops: np.ndarray = None
    violations: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)


def evolve_state(spec, rho0, grid, substeps=DEFAULT_SUBSTEPS):
    """Integrate ``d rho/dt = L(t)[rho]`` with fixed-step RK4.

    ``substeps`` is the number of RK4 steps per unit time; each grid interval
    gets ``ceil(dt * substeps)`` equal steps.  Density-matrix invariant
    violations along the way are collected in ``Trajectory.violations``
    rather than clamped (they signal non-CP dynamics or too coarse a step).
    """
    grid = check_grid(grid)
    rho0 = np.asarray(rho0, dtype=complex)
    n = len(rho0)
    ys = _rk4(lambda t: assemble_generator(spec, t), vec(rho0), grid, substeps)
    states = np.array([unvec(y, n) for y in ys])
    violations = []
    for t, rho in zip(grid, states):
        problems = check_density_matrix(rho, herm_tol=TRACE_TOL, trace_tol=TRACE_TOL)
        if problems:
            violations.append((float(t), problems))
    return Trajectory(grid, states, violations=violations)


def evolve_propagator(spec, grid, substeps=DEFAULT_SUBSTEPS):
    """Integrate ``d Lambda/dt = L(t) Lambda`` from ``Lambda(0) = id``."""
    grid = check_grid(grid)
    n = spec.dim
    Ls = _rk4(lambda t: assemble_generator(spec, t), identity_superop(n), grid, substeps)
    return np.array(Ls)


def propagator_slice(lam_t, lam_s, cond_limit=COND_LIMIT):
    """``V(t, s) = Lambda(t) Lambda(s)^-1`` via LU; returns ``(V, cond)``."""
    cond = float(np.linalg.cond(lam_s))
    if not np.isfinite(cond) or cond > cond_limit:
        raise NonInvertibleError(f"Lambda(s) is not invertible (condition number {cond:.3e})")
    V = np.linalg.solve(lam_s.T, lam_t.T).T
    return V, cond


# ---------------------------------------------------------------------------
# Kraus channels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KrausChannel:
    """``rho -> sum_k pi_k A_k rho A_k^dag`` over a noise family."""

    family: NoiseFamily
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.family),):
            raise ValueError("one weight per family element required")
        object.__setattr__(self, "weights", w)

    def normalization_error(self):
        ops = self.family.ops
        S = np.einsum("k,kji,kjl->il", self.weights, ops.conj(), ops)
        return float(np.max(np.abs(S - np.eye(self.family.dim))))

    def validate(self, norm_tol=1e-10, weight_tol=1e-12):
        err = self.normalization_error()
        if err > norm_tol:
            raise ValueError(f"sum pi_k A_k^dag A_k deviates from identity by {err:.3e}")
        if self.weights.min() < -weight_tol:
            raise ValueError(f"negative Kraus weight {self.weights.min():.3e}")

    def superop(self):
        return sum(w * conjugation_superop(A) for w, A in zip(self.weights, self.family.ops))


def apply_kraus(ch, rho):
    ch.validate()
    ops = ch.family.ops
    return np.einsum("k,kij,jl,kml->im", ch.weights, ops, rho, ops.conj())


# ---------------------------------------------------------------------------
# Pauli strings: Kraus weights from rates
# ---------------------------------------------------------------------------

@dataclass
class PauliWeights:
    times: np.ndarray
    labels: tuple
    weights: np.ndarray        # (T, 4^N)
    eigenvalues: np.ndarray    # channel eigenvalues lambda_a(t), (T, 4^N)
    cp: np.ndarray             # per-time flag: all weights >= -tol
    residual: float            # pi <-> gamma relation residual, max over grid
    literal_residual: float    # same relation with the product bracket read literally
    literal_offender: tuple = None

    def channel(self, family, i):
        return KrausChannel(family, self.weights[i])


def _delta_bracket(i, k):
    """Per-qubit factor ``2 (d_ik + d_i0 + d_k0 - 2 d_i0 d_k0 - 1/2)``."""
    d = lambda a, b: 1.0 if a == b else 0.0
    return 2 * (d(i, k) + d(i, 0) + d(k, 0) - 2 * d(i, 0) * d(k, 0) - 0.5)


def delta_laplacian_eigenvalues(alpha, labels, literal=False):
    """Eigenvalue of ``Delta_alpha`` on each Pauli-string expectation function.

    Evaluates ``2 sum_i alpha_i (prod_l c_l(i, k) - 1)``.  With
    ``literal=True`` the ``-1`` sits inside the product over qubits,
    ``2 sum_i alpha_i prod_l (c_l(i, k) - 1)``, which coincides with the
    former only for a single qubit.
    """
    out = np.zeros(len(labels))
    for a, k in enumerate(labels):
        acc = 0.0
        for b, i in enumerate(labels):
            factors = [_delta_bracket(il, kl) for il, kl in zip(i, k)]
            if literal:
                acc += alpha[b] * np.prod([f - 1 for f in factors])
            else:
                acc += alpha[b] * (np.prod(factors) - 1)
        out[a] = 2 * acc
    return out


def pauli_pi_from_gamma(rates, grid, tol=NEGATIVE_WEIGHT_TOL):
    """Kraus weights ``pi(t)`` of the Pauli-string channel generated by ``rates``.

    The channel eigenvalue on ``eta_a`` is
    ``lambda_a(t) = exp(1/2 int_0^t sum_b gamma_b (c(a, b) - 1))`` and
    ``lambda = C pi`` with ``C^2 = 4^N``, so ``pi = C lambda / 4^N``.  The
    rate/weight relation ``Delta_pidot = 1/2 Delta_gamma (1/2 Delta_pi + 1)``
    is evaluated on the grid as a residual.
    """
    grid = check_grid(grid)
    labels = tuple(rates.labels)
    N = len(labels[0])
    C = pauli_sign_matrix(N)
    G = 0.5 * (C - 1)
    G[:, 0] = 0.0  # identity rate ignored
    integ = np.zeros(len(labels))
    lams, res, lit_res, offender = [], 0.0, 0.0, None
    for i, t in enumerate(grid):
        if i:
            integ = integ + rates.integral(grid[i - 1], t)
        lams.append(np.exp(G @ integ))
    lams = np.array(lams)
    weights = lams @ C.T / 4 ** N
    for t, lam, pi in zip(grid, lams, weights):
        gam = rates(t)
        gam[0] = 0.0
        pidot = C @ ((G @ gam) * lam) / 4 ** N
        for literal in (False, True):
            r = (delta_laplacian_eigenvalues(pidot, labels, literal)
                 - 0.5 * delta_laplacian_eigenvalues(gam, labels, literal)
                 * (0.5 * delta_laplacian_eigenvalues(pi, labels, literal) + 1))
            worst = float(np.max(np.abs(r)))
            if literal:
                if worst > lit_res:
                    lit_res = worst
                    offender = labels[int(np.argmax(np.abs(r)))]
            else:
                res = max(res, worst)
    cp = weights.min(axis=1) >= -tol
    return PauliWeights(grid, labels, weights, lams, cp, res, lit_res,
                        offender if lit_res > 1e-8 else None)
