from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_complex, random_hermitian
from opstruct.errors import NotHermitian, NotPSD
from opstruct.kernels import (
    hermitian_eig, jacobi_eigh, jacobi_svd, max_principal_angle, min_modulus, null_basis, numerical_rank,
    operator_norm, orthonormal_basis, polar_decompose, psd_check, sqrt_psd, svd, symmetrize,
    trace_identity_defect, trace_identity_guard,
)

SHIFT4 = np.diag(np.ones(3), -1)


# -- worked examples ---------------------------------------------------------------


def test_eig_diagonal_is_sorted_with_permuted_basis():
    e = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.array_equal(e.values, [1.0, 2.0, 3.0])
    assert np.array_equal(np.abs(e.vectors), np.eye(3)[:, [1, 2, 0]])


@pytest.mark.parametrize("a, expected", [
    ([[0.0, 1.0], [1.0, 0.0]], [-1.0, 1.0]),
    ([[2.0, 1.0], [1.0, 2.0]], [1.0, 3.0]),
])
def test_eig_two_by_two(a, expected):
    for method in ("lapack", "jacobi"):
        e = hermitian_eig(np.array(a), method=method)
        assert np.allclose(e.values, expected, atol=1e-15)
        assert np.allclose(np.array(a) @ e.vectors, e.vectors * e.values, atol=1e-14)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_svd_identity_and_shift():
    assert np.array_equal(svd(np.eye(4)).s, np.ones(4))
    assert np.array_equal(svd(SHIFT4).s, [1.0, 1.0, 1.0, 0.0])
    assert np.allclose(jacobi_svd(SHIFT4).s, [1.0, 1.0, 1.0, 0.0], atol=1e-15)


def test_svd_signs_move_into_vectors():
    u, s, v = svd(np.diag([1.0, -2.0]))
    assert np.array_equal(s, [2.0, 1.0])
    assert np.allclose(u @ np.diag(s) @ v.conj().T, np.diag([1.0, -2.0]), atol=1e-15)


def test_sqrt_psd_examples():
    assert np.array_equal(sqrt_psd(np.diag([4.0, 9.0, 0.0])).real, np.diag([2.0, 3.0, 0.0]))
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    r = sqrt_psd(a)
    assert np.allclose(r @ r, a, atol=1e-14)
    with pytest.raises(NotPSD):
        sqrt_psd(np.diag([1.0, -1.0]))


def test_psd_check_threshold_is_relative():
    assert psd_check(np.diag([1.0, -1e-12])).holds
    res = psd_check(np.diag([1.0, -1e-3]))
    assert not res.holds and res.min_eigenvalue == -1e-3


def test_polar_of_shift_is_partial_isometry():
    p = polar_decompose(SHIFT4)
    assert p.rank == 3 and p.null_dim == 1
    assert np.array_equal(p.modulus.real, np.diag([1.0, 1.0, 1.0, 0.0]))
    assert np.allclose(p.W @ p.modulus, SHIFT4, atol=1e-15)


def test_polar_rectangular_column_section():
    t = np.vstack([np.zeros((1, 3)), np.eye(3)])  # 4 x 3 shift column block
    p = polar_decompose(t)
    assert p.W.shape == (4, 3) and p.null_dim == 0
    assert np.allclose(p.W.conj().T @ p.W, np.eye(3), atol=1e-15)
    assert np.allclose(p.modulus, np.eye(3), atol=1e-15)


def test_rank_and_bases():
    a = np.diag([3.0, 1e-12, 0.0, 2.0])
    s = svd(a).s
    assert numerical_rank(s) == 2
    rng_basis = orthonormal_basis(a)
    ker = null_basis(a)
    assert rng_basis.shape[1] == 2 and ker.shape[1] == 2
    assert np.allclose(rng_basis.conj().T @ ker, 0, atol=1e-15)
    assert max_principal_angle(ker, np.eye(4)[:, [1, 2]]) < 1e-12


def test_min_modulus_and_norm():
    assert min_modulus(np.diag([3.0, 0.5])) == pytest.approx(0.5, abs=1e-15)
    assert min_modulus(np.ones((2, 3))) == 0.0
    assert operator_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0, abs=1e-15)


def test_symmetrize_averages():
    a = np.array([[1.0, 2.0], [2.0 + 1e-15, 1.0]])
    assert np.array_equal(symmetrize(a), symmetrize(a).conj().T)


# -- Jacobi reference against LAPACK --------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 5, 12, 24])
def test_lapack_eigh_matches_jacobi_reference(n):
    rng = np.random.default_rng(n)
    a = random_hermitian(rng, n)
    fast, ref = hermitian_eig(a), jacobi_eigh(a)
    scale = max(1.0, np.abs(fast.values).max())
    assert np.allclose(fast.values, ref.values, atol=1e-12 * scale)
    for e in (fast, ref):
        assert np.linalg.norm(a @ e.vectors - e.vectors * e.values, 2) <= 1e-10 * scale
        assert np.allclose(e.vectors.conj().T @ e.vectors, np.eye(n), atol=1e-12)


@pytest.mark.parametrize("m, n", [(1, 1), (4, 3), (3, 4), (10, 10), (17, 9)])
def test_lapack_svd_matches_jacobi_reference(m, n):
    rng = np.random.default_rng(10 * m + n)
    a = random_complex(rng, m, n)
    fast, ref = svd(a), jacobi_svd(a)
    k = min(m, n)
    assert np.allclose(fast.s, ref.s[:k], atol=1e-12 * fast.s[0])
    for u, s, v in (fast, ref):
        rebuilt = u[:, :k] @ np.diag(s[:k]) @ v[:, :k].conj().T
        assert np.linalg.norm(rebuilt - a, 2) <= 1e-10 * s[0]


# -- properties --------------------------------------------------------------------

dims = st.integers(min_value=1, max_value=12)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(dims, dims, seeds)
def test_polar_round_trip(m, n, seed):
    rng = np.random.default_rng(seed)
    t = random_complex(rng, m, n)
    if seed % 3 == 0 and n > 1:
        t[:, -1] = t[:, 0]  # force a kernel
    p = polar_decompose(t)
    norm = operator_norm(t)
    assert np.linalg.norm(p.W @ p.modulus - t, 2) <= 1e-10 * norm
    assert psd_check(p.modulus).holds
    proj = p.W.conj().T @ p.W
    assert np.linalg.norm(proj @ proj - proj, 2) <= 1e-10
    # W*W projects onto the closure of the range of |T|
    assert np.linalg.norm(proj @ p.modulus - p.modulus, 2) <= 1e-10 * norm
    assert p.rank + p.null_dim == n


@given(dims, seeds)
def test_sqrt_of_square_is_identity_on_psd(n, seed):
    rng = np.random.default_rng(seed)
    g = random_complex(rng, n, n)
    a = g.conj().T @ g
    r = sqrt_psd(a)
    assert np.linalg.norm(r @ r - a, 2) <= 1e-10 * operator_norm(a)
    assert np.linalg.norm(sqrt_psd(r @ r) - r, 2) <= 1e-6 * operator_norm(r)


@given(dims, dims, seeds)
def test_svd_and_gram_eigenvalues_agree(m, n, seed):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, m, n)
    s = svd(a).s
    w = hermitian_eig(a.conj().T @ a).values[::-1]
    k = min(m, n)
    assert np.allclose(s[:k] ** 2, w[:k], atol=1e-10 * s[0] ** 2)


@given(dims, seeds)
def test_trace_identity_guard_on_random_matrices(n, seed):
    a = random_complex(np.random.default_rng(seed), n, n)
    assert trace_identity_guard(a)
    assert trace_identity_defect(a) <= 1e-12


@pytest.mark.parametrize("t, w, modulus", [
    (np.eye(2), np.eye(2), np.eye(2)),
    (np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]]), np.diag([1.0, 0.0])),
    (np.diag([2.0, -3.0]), np.diag([1.0, -1.0]), np.diag([2.0, 3.0])),
])
def test_polar_small_examples(t, w, modulus):
    p = polar_decompose(t)
    assert np.allclose(p.W, w, atol=1e-15)
    assert np.allclose(p.modulus, modulus, atol=1e-15)


def test_polar_of_zero_is_zero():
    p = polar_decompose(np.zeros((3, 3)))
    assert p.null_dim == 3 and not np.any(p.W) and not np.any(p.modulus)


def test_shift_self_commutator_is_not_psd():
    d = SHIFT4.T @ SHIFT4 - SHIFT4 @ SHIFT4.T
    assert np.array_equal(d, np.diag([1.0, 0.0, 0.0, -1.0]))
    assert psd_check(d) == (False, -1.0)
    assert psd_check(np.diag([0.0, 1.0])) == (True, 0.0)


def test_norm_and_min_modulus_of_diagonal_and_shift():
    assert operator_norm(np.diag([1.0, 2.0, 3.0])) == pytest.approx(3.0, abs=1e-15)
    assert min_modulus(np.diag([1.0, 2.0, 3.0])) == pytest.approx(1.0, abs=1e-15)
    assert operator_norm(SHIFT4) == pytest.approx(1.0, abs=1e-15)
    assert min_modulus(SHIFT4) == pytest.approx(0.0, abs=1e-15)
