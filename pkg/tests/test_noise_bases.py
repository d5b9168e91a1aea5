import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qudit_decoherence.noise_bases import (
    GELL_MANN, MUB, PAULI, UnsupportedDimension, clock, expand, family,
    gell_mann, is_prime, mub_differences, mub_projectors, mub_vectors,
    pauli_string, pauli_strings, shift, weyl, weyl_operator)

PRIMES = [2, 3, 5, 7]


def gram(ops):
    return np.einsum("aij,bij->ab", np.conj(ops), ops)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_gell_mann_structure(n):
    fam = gell_mann(n)
    assert len(fam) == n * n
    kinds = [lab[0] for lab in fam.labels]
    assert kinds.count("S") == kinds.count("A") == n * (n - 1) // 2
    assert kinds.count("D") == n  # includes the identity
    assert np.allclose(fam[("D", 0, 0)], np.eye(n))
    assert fam.hermitian
    G = gram(fam.ops)
    expected = 2 * np.eye(n * n)
    expected[0, 0] = n
    assert np.allclose(G, expected)
    assert all(abs(np.trace(T)) < 1e-12 for T in fam.ops[1:])


def test_gell_mann_qubit_is_pauli():
    fam = gell_mann(2)
    assert np.allclose(fam[("S", 0, 1)], PAULI[1])
    assert np.allclose(fam[("A", 0, 1)], PAULI[2])
    assert np.allclose(fam[("D", 1, 1)], PAULI[3])


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_weyl_orthogonal_unitary(n):
    fam = weyl(n)
    assert fam.unitary
    assert np.allclose(gram(fam.ops), n * np.eye(n * n))


@given(st.integers(2, 7), st.data())
def test_weyl_commutation_phase(n, data):
    k1, k2, j1, j2 = (data.draw(st.integers(0, n - 1)) for _ in range(4))
    U, V = weyl_operator(n, k1, k2), weyl_operator(n, j1, j2)
    phase = np.exp(2j * np.pi * (k1 * j2 - k2 * j1) / n)
    assert np.allclose(V @ U @ V.conj().T, phase * U)


def test_weyl_generators():
    n = 5
    Om = np.exp(2j * np.pi / n)
    S, Z = shift(n), clock(n)
    assert np.allclose(S @ Z, Om * Z @ S)
    assert np.allclose(weyl_operator(n, 2, 3), np.linalg.matrix_power(Z, 2)
                       @ np.linalg.matrix_power(S, 3))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_pauli_strings(N):
    fam = pauli_strings(N)
    assert len(fam) == 4 ** N and fam.dim == 2 ** N
    assert fam.hermitian and fam.unitary
    assert np.allclose(gram(fam.ops), 2 ** N * np.eye(4 ** N))
    assert np.allclose(fam[(3,) * N], pauli_string((3,) * N))


@pytest.mark.parametrize("n", PRIMES)
def test_mub_unbiased_and_orthonormal(n):
    B = mub_vectors(n)
    for a, b in itertools.product(range(n + 1), repeat=2):
        overlaps = np.abs(B[a].conj() @ B[b].T) ** 2
        if a == b:
            assert np.allclose(overlaps, np.eye(n))
        else:
            assert np.allclose(overlaps, 1.0 / n)


@pytest.mark.parametrize("n", PRIMES)
def test_mub_basis_diagonalizes_weyl_line(n):
    B = mub_vectors(n)
    for b in range(n):
        U = weyl_operator(n, b, 1)
        for v in B[b + 1]:
            w = U @ v
            lam = np.vdot(v, w)
            assert np.allclose(w, lam * v)


@pytest.mark.parametrize("n", PRIMES)
def test_mub_projectors_resolve_identity(n):
    fam = mub_projectors(n)
    assert fam.kind == MUB and fam.identity_label is None
    for a in range(n + 1):
        assert np.allclose(sum(fam[(a, k)] for k in range(n)), np.eye(n))
    labels, Q = mub_differences(fam)
    assert len(labels) == (n + 1) * (n - 1)
    # the Q's span the traceless operators
    _, res = expand(Q, np.diag(np.arange(n)) - (n - 1) / 2 * np.eye(n))
    assert res < 1e-12


@pytest.mark.parametrize("n", [4, 6, 8, 9])
def test_mub_non_prime_rejected(n):
    with pytest.raises(UnsupportedDimension):
        mub_projectors(n)


def test_family_dispatch():
    assert family(GELL_MANN, 3).dim == 3
    assert family("pauli-string", 8).dim == 8
    with pytest.raises(UnsupportedDimension):
        family("pauli-string", 6)
    with pytest.raises(ValueError):
        family("nope", 2)


def test_is_prime():
    assert [k for k in range(20) if is_prime(k)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_family_ops_are_read_only():
    with pytest.raises(ValueError):
        weyl(2).ops[0, 0, 0] = 5
