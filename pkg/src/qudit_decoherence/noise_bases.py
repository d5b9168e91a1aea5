"""The four noise-operator families generalizing the Pauli matrices.

Each constructor returns a :class:`NoiseFamily` whose ``labels`` and ``ops``
are aligned.  Ordering conventions:

* ``gell_mann``: identity ``("D", 0, 0)`` first, then for every pair
  ``k1 < k2`` (lexicographic) the symmetric ``("S", k1, k2)`` and the
  antisymmetric ``("A", k1, k2)`` matrices, then the diagonal
  ``("D", k, k)`` for ``k = 1..n-1``.  For ``n = 2`` this is
  ``[1, sx, sy, sz]``.
* ``weyl``: labels ``(k1, k2)`` in lexicographic order.
* ``pauli_strings``: labels ``(k1, ..., kN)`` in ``{0,1,2,3}^N``,
  lexicographic.
* ``mub_projectors``: labels ``(alpha, k)``; ``alpha = 0`` is the
  computational basis, ``alpha = b + 1`` the eigenbasis of ``U_{b,1}``.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .operator_core import is_hermitian, is_unitary

GELL_MANN = "gell-mann"
WEYL = "weyl"
PAULI_STRING = "pauli-string"
MUB = "mub"
FAMILY_KINDS = (GELL_MANN, WEYL, PAULI_STRING, MUB)

PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


class UnsupportedDimension(ValueError):
    pass


@dataclass(frozen=True)
class NoiseFamily:
    kind: str
    dim: int
    labels: tuple
    ops: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.labels) != len(self.ops):
            raise ValueError("labels and ops are misaligned")
        self.ops.setflags(write=False)

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, label):
        return self.ops[self.index(label)]

    def index(self, label):
        return self.labels.index(tuple(label))

    @property
    def identity_label(self):
        """Label of the identity element, or None (MUB projectors)."""
        return None if self.kind == MUB else self.labels[0]

    @property
    def hermitian(self):
        return all(is_hermitian(A) for A in self.ops)

    @property
    def unitary(self):
        return all(is_unitary(A) for A in self.ops)


def _unit(n, i, j):
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1.0
    return E


def is_prime(n):
    return n >= 2 and all(n % p for p in range(2, int(n ** 0.5) + 1))


def gell_mann(n):
    if n < 2:
        raise UnsupportedDimension(f"Gell-Mann family needs n >= 2, got {n}")
    labels = [("D", 0, 0)]
    ops = [np.eye(n, dtype=complex)]
    for k1, k2 in itertools.combinations(range(n), 2):
        labels.append(("S", k1, k2))
        ops.append(_unit(n, k1, k2) + _unit(n, k2, k1))
        labels.append(("A", k1, k2))
        ops.append(-1j * (_unit(n, k1, k2) - _unit(n, k2, k1)))
    for k in range(1, n):
        d = np.zeros(n, dtype=complex)
        d[:k] = 1.0
        d[k] = -k
        labels.append(("D", k, k))
        ops.append(np.sqrt(2.0 / (k * (k + 1))) * np.diag(d))
    return NoiseFamily(GELL_MANN, n, tuple(labels), np.array(ops))


def clock(n):
    return np.diag(np.exp(2j * np.pi * np.arange(n) / n))


def shift(n):
    """``sum_m |m><m+1|`` (indices mod n)."""
    return np.roll(np.eye(n, dtype=complex), 1, axis=1)


def weyl_operator(n, k1, k2):
    """``U_{k1 k2} = sum_m Omega^{k1 m} |m><(m + k2) mod n|``."""
    U = np.zeros((n, n), dtype=complex)
    m = np.arange(n)
    U[m, (m + k2) % n] = np.exp(2j * np.pi * k1 * m / n)
    return U


def weyl(n):
    if n < 2:
        raise UnsupportedDimension(f"Weyl family needs n >= 2, got {n}")
    labels = tuple(itertools.product(range(n), repeat=2))
    ops = np.array([weyl_operator(n, k1, k2) for k1, k2 in labels])
    return NoiseFamily(WEYL, n, labels, ops)


def pauli_string(ks):
    out = np.array([[1.0 + 0j]])
    for k in ks:
        out = np.kron(out, PAULI[k])
    return out


def pauli_strings(N):
    if N < 1:
        raise UnsupportedDimension(f"Pauli strings need N >= 1, got {N}")
    labels = tuple(itertools.product(range(4), repeat=N))
    ops = np.array([pauli_string(ks) for ks in labels])
    return NoiseFamily(PAULI_STRING, 2 ** N, labels, ops)


def mub_vectors(n):
    """The ``n + 1`` mutually unbiased bases for prime ``n``.

    Returns an array ``B`` of shape ``(n + 1, n, n)`` where ``B[alpha, k]``
    is the k-th unit vector of basis alpha.  Basis ``b + 1`` holds the
    eigenvectors of ``U_{b,1} = Z^b X``; writing ``U_{b,1} v = lam v`` gives
    ``v_{m+1} = lam Omega^{-b m} v_m``, solved in closed form below.
    """
    if not is_prime(n):
        raise UnsupportedDimension(
            f"MUB construction implemented for prime n only, got {n}")
    B = np.zeros((n + 1, n, n), dtype=complex)
    B[0] = np.eye(n)
    m = np.arange(n)
    for b in range(n):
        for k in range(n):
            # eigenvalue lam = exp(i pi b (n-1)/n) Omega^k
            phase = np.pi * b * (n - 1) / n + 2 * np.pi * k / n
            B[b + 1, k] = np.exp(1j * (phase * m - 2 * np.pi * b * m * (m - 1) / (2 * n)))
            B[b + 1, k] /= np.sqrt(n)
    return B


def mub_projectors(n):
    B = mub_vectors(n)
    labels = tuple((a, k) for a in range(n + 1) for k in range(n))
    ops = np.array([np.outer(B[a, k], B[a, k].conj()) for a, k in labels])
    return NoiseFamily(MUB, n, labels, ops)


def mub_bases(fam):
    """Number of bases in a MUB family."""
    return fam.dim + 1


def mub_differences(fam):
    """``Q_k^(alpha) = P_k^(alpha) - P_{k-1}^(alpha)`` for ``k = 1..n-1``.

    Returns ``(labels, ops)`` with labels ``(alpha, k)``.
    """
    if fam.kind != MUB:
        raise TypeError(f"MUB differences need a MUB family, got {fam.kind}")
    labels, ops = [], []
    for a in range(fam.dim + 1):
        for k in range(1, fam.dim):
            labels.append((a, k))
            ops.append(fam[(a, k)] - fam[(a, k - 1)])
    return tuple(labels), np.array(ops)


def family(kind, dim):
    """Construct a family by its CLI name; ``dim`` is the Hilbert dimension."""
    if kind == GELL_MANN:
        return gell_mann(dim)
    if kind == WEYL:
        return weyl(dim)
    if kind == PAULI_STRING:
        N = int(round(np.log2(dim))) if dim >= 2 else 0
        if dim < 2 or 2 ** N != dim:
            raise UnsupportedDimension(f"Pauli strings need n = 2^N, got {dim}")
        return pauli_strings(N)
    if kind == MUB:
        return mub_projectors(dim)
    raise ValueError(f"unknown family {kind!r}; expected one of {FAMILY_KINDS}")


def expand(ops, X):
    """Least-squares coefficients of X in the span of ``ops`` and the residual."""
    M = np.array([np.asarray(A).reshape(-1) for A in ops]).T
    c, *_ = np.linalg.lstsq(M, np.asarray(X).reshape(-1), rcond=None)
    return c, float(np.max(np.abs(M @ c - np.asarray(X).reshape(-1))))
