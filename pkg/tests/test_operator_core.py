import numpy as np
import pytest
from hypothesis import given, strategies as st

from qudit_decoherence.operator_core import (
    DimensionError, apply_superop, as_density_matrix, check_density_matrix,
    choi_matrix, compose, conjugation_superop, eig_superop, identity_superop,
    is_cp, is_trace_preserving, left_superop, match_eigenvalues,
    min_choi_eigenvalue, random_density_matrix, random_hermitian,
    random_unitary, right_superop, sandwich_superop, trace_norm, trace_norms,
    transpose_superop, unvec, vec)

dims = st.integers(2, 5)
seeds = st.integers(0, 2**32 - 1)


@given(dims, seeds)
def test_vec_unvec_roundtrip(n, seed):
    X = random_hermitian(n, np.random.default_rng(seed)) + 1j
    assert np.array_equal(unvec(vec(X)), X)
    stack = np.array([X, 2 * X])
    assert np.array_equal(unvec(vec(stack)), stack)


@given(dims, seeds)
def test_sandwich_matches_matrix_product(n, seed):
    rng = np.random.default_rng(seed)
    A, B, X = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(3))
    assert np.allclose(apply_superop(sandwich_superop(A, B), X), A @ X @ B)
    assert np.allclose(apply_superop(left_superop(A), X), A @ X)
    assert np.allclose(apply_superop(right_superop(B), X), X @ B)


def test_column_stacking_convention():
    X = np.array([[1, 2], [3, 4]])
    assert vec(X).tolist() == [1, 3, 2, 4]


@given(dims, seeds)
def test_unitary_conjugation_is_cptp(n, seed):
    U = random_unitary(n, np.random.default_rng(seed))
    S = conjugation_superop(U)
    assert is_cp(S) and is_trace_preserving(S)
    # a unitary channel has a rank-one Choi matrix with eigenvalue n
    assert np.isclose(np.linalg.eigvalsh(choi_matrix(S)).max(), n)


def test_transpose_is_positive_but_not_cp():
    T = transpose_superop(2)
    assert min_choi_eigenvalue(T) == pytest.approx(-1.0)
    assert is_trace_preserving(T)
    rho = random_density_matrix(2, np.random.default_rng(1))
    assert np.allclose(apply_superop(T, rho), rho.T)


def test_identity_choi_is_unnormalized_bell_projector():
    J = choi_matrix(identity_superop(3))
    w = np.linalg.eigvalsh(J)
    assert np.allclose(sorted(w), [0] * 8 + [3])


@given(dims, seeds, st.integers(1, 5))
def test_random_states_are_valid(n, seed, rank):
    rho = random_density_matrix(n, np.random.default_rng(seed), min(rank, n))
    assert check_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-12) == []


def test_density_matrix_violations_are_reported():
    bad = np.array([[1.2, 0], [0, -0.2]])
    problems = check_density_matrix(bad)
    assert any("negative eigenvalue" in p for p in problems)
    with pytest.raises(ValueError):
        as_density_matrix(np.array([[0.5, 1j], [0, 0.5]]))
    with pytest.raises(DimensionError):
        check_density_matrix(np.ones((2, 3)))


@given(dims, seeds)
def test_trace_norm_of_hermitian_is_sum_abs_eigenvalues(n, seed):
    H = random_hermitian(n, np.random.default_rng(seed))
    ref = np.abs(np.linalg.eigvalsh(H)).sum()
    assert trace_norm(H) == pytest.approx(ref, rel=1e-12)
    assert trace_norms(np.array([H, -H])) == pytest.approx([ref, ref], rel=1e-12)


@given(dims, seeds)
def test_eig_superop_reconstructs(n, seed):
    rng = np.random.default_rng(seed)
    S = conjugation_superop(random_unitary(n, rng)) - identity_superop(n)
    vals, ops = eig_superop(S)
    for lam, X in zip(vals, ops):
        assert np.linalg.norm(X) == pytest.approx(1.0)
        assert np.allclose(apply_superop(S, X), lam * X, atol=1e-9)


def test_match_eigenvalues_is_permutation_invariant():
    a = np.array([1, 2j, -3, 0.5])
    assert match_eigenvalues(a, a[::-1]) == 0.0
    assert match_eigenvalues(a, a + 1e-3) == pytest.approx(1e-3)
    with pytest.raises(DimensionError):
        match_eigenvalues(a, a[:2])


def test_compose_order():
    A = conjugation_superop(np.array([[0, 1], [1, 0]]))
    B = left_superop(np.diag([1.0, 2.0]))
    X = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose(apply_superop(compose(A, B), X),
                       apply_superop(A, apply_superop(B, X)))
