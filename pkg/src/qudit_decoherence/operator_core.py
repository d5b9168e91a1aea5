"""Dense operator algebra: density matrices, superoperators, Choi matrices.

Superoperators are plain ``(n*n, n*n)`` complex arrays acting on
column-stacked operators, so that ``vec(A X B) = (B.T kron A) vec(X)`` and
the conjugation ``X -> U X U^dag`` is ``kron(U.conj(), U)``.
"""

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10


class DimensionError(ValueError):
    pass


def _square(X, name="X"):
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {X.shape}")
    return X


def dagger(X):
    return np.conj(np.swapaxes(X, -1, -2))


def commutator(A, B):
    return A @ B - B @ A


def anticommutator(A, B):
    return A @ B + B @ A


def is_hermitian(X, tol=HERMITIAN_TOL):
    X = _square(X)
    return bool(np.max(np.abs(X - X.conj().T), initial=0.0) <= tol)


def is_unitary(U, tol=HERMITIAN_TOL):
    U = _square(U)
    return bool(np.max(np.abs(U @ U.conj().T - np.eye(len(U)))) <= tol)


def check_density_matrix(rho, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL,
                         psd_tol=PSD_TOL):
    """Return a list of violated density-matrix invariants (empty if valid)."""
    rho = _square(rho, "rho")
    problems = []
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        problems.append(f"not Hermitian (max |rho - rho^dag| = {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        problems.append(f"trace {tr:.15g} != 1")
    lam = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if lam < psd_tol:
        problems.append(f"negative eigenvalue {lam:.3e}")
    return problems


def as_density_matrix(rho, **tols):
    rho = np.array(rho, dtype=complex)
    problems = check_density_matrix(rho, **tols)
    if problems:
        raise ValueError("invalid density matrix: " + "; ".join(problems))
    return rho


def random_density_matrix(n, rng, rank=None):
    """Random full-rank (or given rank) state from the Ginibre ensemble."""
    rank = n if rank is None else rank
    G = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_pure_state(n, rng):
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    return psi / np.linalg.norm(psi)


def random_hermitian(n, rng, traceless=False):
    G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = (G + G.conj().T) / 2
    if traceless:
        H = H - np.trace(H) / n * np.eye(n)
    return H


def random_unitary(n, rng):
    Z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


# ---------------------------------------------------------------------------
# vectorization and superoperators
# ---------------------------------------------------------------------------

def vec(X):
    """Column-stack an operator (or a stack of operators along axis 0)."""
    X = np.asarray(X)
    if X.ndim == 2:
        return X.reshape(-1, order="F")
    return np.swapaxes(X, -1, -2).reshape(X.shape[0], -1)


def unvec(v, n=None):
    v = np.asarray(v)
    if n is None:
        n = int(round(np.sqrt(v.shape[-1])))
    if n * n != v.shape[-1]:
        raise DimensionError(f"vector of length {v.shape[-1]} is not n^2")
    if v.ndim == 1:
        return v.reshape(n, n, order="F")
    return np.swapaxes(v.reshape(v.shape[0], n, n), -1, -2)


def superop_dim(S):
    S = _square(S, "superoperator")
    n = int(round(np.sqrt(S.shape[0])))
    if n * n != S.shape[0]:
        raise DimensionError(f"superoperator of size {S.shape[0]} is not n^2")
    return n


def identity_superop(n):
    return np.eye(n * n, dtype=complex)


def sandwich_superop(A, B):
    """Superoperator of ``X -> A X B``."""
    return np.kron(np.asarray(B).T, np.asarray(A))


def conjugation_superop(U):
    """Superoperator of ``X -> U X U^dag``."""
    U = np.asarray(U)
    return np.kron(U.conj(), U)


def left_superop(A):
    return np.kron(np.eye(len(A)), A)


def right_superop(B):
    return np.kron(np.asarray(B).T, np.eye(len(B)))


def transpose_superop(n):
    T = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            # vec index of E_ij is i + n*j
            T[j + n * i, i + n * j] = 1.0
    return T


def apply_superop(S, X):
    X = _square(X)
    n = superop_dim(S)
    if X.shape[0] != n:
        raise DimensionError(f"superoperator acts on {n}x{n}, got {X.shape}")
    return unvec(S @ vec(X), n)


def compose(*maps):
    """Composition ``maps[0] o maps[1] o ...`` (rightmost applied first)."""
    out = maps[0]
    for S in maps[1:]:
        out = out @ S
    return out


def choi_matrix(S):
    """Choi matrix ``J(S) = sum_ij E_ij kron S[E_ij]``."""
    n = superop_dim(S)
    J = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n))
            E[i, j] = 1.0
            J += np.kron(E, apply_superop(S, E))
    return J


def min_choi_eigenvalue(S):
    J = choi_matrix(S)
    return float(np.linalg.eigvalsh((J + J.conj().T) / 2).min())


def is_cp(S, tol=1e-9):
    return min_choi_eigenvalue(S) >= -tol


def is_trace_preserving(S, tol=1e-10):
    n = superop_dim(S)
    # trace functional is vec(1)^dag
    return bool(np.max(np.abs(vec(np.eye(n)) @ S - vec(np.eye(n)))) <= tol)


def trace_norm(X):
    X = _square(X)
    return float(np.linalg.svd(X, compute_uv=False).sum())


def trace_norms(Xs):
    """Trace norms of a stack of operators (last two axes)."""
    return np.linalg.svd(np.asarray(Xs), compute_uv=False).sum(axis=-1)


def hs_inner(A, B):
    return np.vdot(A, B)


def eig_superop(S):
    """Full spectrum of a superoperator.

    Returns ``(vals, ops)`` where ``ops[k]`` is the eigenoperator of
    ``vals[k]`` with unit Hilbert-Schmidt norm.  Non-normal input is handled
    by the general complex eigensolver.
    """
    n = superop_dim(S)
    vals, vecs = np.linalg.eig(S)
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    return vals, unvec(vecs.T, n)


def match_eigenvalues(predicted, numeric, tol=1e-8):
    """Pair each predicted eigenvalue with a distinct nearest numeric one.

    Returns the max pairing distance; greedy nearest-match is adequate
    because both sides are multisets of the same size.
    """
    predicted = np.asarray(predicted, dtype=complex)
    pool = list(np.asarray(numeric, dtype=complex))
    if len(pool) != len(predicted):
        raise DimensionError("spectra of different sizes")
    worst = 0.0
    for lam in sorted(predicted, key=lambda z: (z.real, z.imag)):
        d = np.abs(np.array(pool) - lam)
        k = int(np.argmin(d))
        worst = max(worst, float(d[k]))
        pool.pop(k)
    return worst
