from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_complex
from opstruct.config import DEFAULT_TOL
from opstruct.decomposition import (
    PositiveCanonicalForm, adjoint_block_form, analyze_positive_form, block_reduce_positive,
    hyponormal_block_form, invert_closure_an, k3_from_form, normal_by_corollary, normality_from_blocks,
    positive_canonical_form, quasinormal_decompose, redecompose,
)
from opstruct.errors import AlphaZero, NotHyponormal, NotInvertible, NotPositive, NotQuasinormal
from opstruct.generate import generate_family, random_unitary
from opstruct.kernels import max_principal_angle, operator_norm, psd_check, sqrt_psd
from opstruct.model import (
    INF, DiagonalWithLimit, FiniteMatrix, PointSet, ScaledIdentity, SequenceRule, SpectralProfile, adjoint,
    column_section, direct_sum, odd_even_example, render, scale, unilateral_shift,
)

TOL = DEFAULT_TOL
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def coordinate_basis(n: int, idx) -> np.ndarray:
    return np.eye(n, dtype=complex)[:, list(idx)]


# -- positive canonical form ---------------------------------------------------------


def test_positive_form_of_identity_plus_compact():
    op = DiagonalWithLimit(SequenceRule("1 + 1/k"), 1.0)
    form = positive_canonical_form(op, 32, alpha=1.0)
    assert not np.any(np.abs(form.K1) > 1e-15)
    assert np.allclose(form.K2, np.diag(1 / np.arange(1, 33)), atol=1e-15)


def test_positive_form_of_example_modulus_against_square_root():
    n = 64
    c = column_section(odd_even_example(), n)
    modulus = sqrt_psd(c.conj().T @ c)
    form = positive_canonical_form(modulus, alpha=1.0)
    k = np.zeros(n)
    k[1::2] = 1 / (2 * np.arange(1, n // 2 + 1))
    assert np.allclose(form.K1, np.diag(1 - np.sqrt(1 - k)), atol=1e-14)
    assert np.allclose(form.K2, 0, atol=1e-15)


def test_positive_form_of_scalar():
    form = positive_canonical_form(ScaledIdentity(1.5), 8, alpha=1.5)
    assert form.alpha == 1.5 and not np.any(form.K1) and not np.any(form.K2)


def test_positive_form_uses_declared_alpha():
    op = DiagonalWithLimit(SequenceRule("2 - 1/(k+1)"), 2.0,
                           declared_profile=SpectralProfile(essential_points=(2.0,)))
    form = positive_canonical_form(op, 32, dims=(32, 64, 128))
    assert form.alpha == 2.0 and form.alpha_source == "declared"


def test_positive_form_rejects_non_positive():
    with pytest.raises(NotPositive):
        positive_canonical_form(np.diag([1.0, -1.0]), alpha=1.0)


def _form(alpha, k1, k2) -> PositiveCanonicalForm:
    k1, k2 = np.asarray(k1, dtype=complex), np.asarray(k2, dtype=complex)
    t = alpha * np.eye(k1.shape[0]) - k1 + k2
    return PositiveCanonicalForm(alpha, k1, k2, t)


def test_analysis_examples():
    a = analyze_positive_form(_form(1.0, np.diag([1.0, 0, 0]), np.zeros((3, 3))))
    assert a.kernel_dim == 1 and a.norm_k1 == 1.0 and a.iff_holds
    b = analyze_positive_form(_form(1.0, np.diag([0.5, 0, 0]), np.zeros((3, 3))))
    assert b.kernel_dim == 0 and b.norm_k1 == 0.5 and b.iff_holds
    c = analyze_positive_form(_form(2.0, np.zeros((3, 3)), np.zeros((3, 3))))
    assert c.kernel_dim == 0 and c.fredholm.is_fredholm and c.fredholm.essential_min_modulus == 2.0


def test_block_reduction_examples():
    r = block_reduce_positive(_form(1.0, np.diag([0.0, 0.5]), np.diag([1 / 3, 0.0])))
    assert np.allclose(r.upper_block, [[1 + 1 / 3]], atol=1e-15)
    assert np.allclose(r.lower_block, [[0.5]], atol=1e-15)
    assert r.off_diagonal <= 1e-15
    whole = block_reduce_positive(_form(1.0, np.zeros((3, 3)), np.diag([0.5, 0.25, 0])))
    assert whole.null_basis.shape[1] == 3 and whole.range_basis.shape[1] == 0


def test_block_reduction_of_example_modulus_splits_odd_and_even():
    n = 32
    c = column_section(odd_even_example(), n)
    form = positive_canonical_form(sqrt_psd(c.conj().T @ c), alpha=1.0)
    r = block_reduce_positive(form)
    assert max_principal_angle(r.null_basis, coordinate_basis(n, range(0, n, 2))) < 1e-12
    assert r.off_diagonal <= 1e-14 and r.lower_defect <= 1e-14


@given(seeds)
def test_positive_form_round_trip_and_uniqueness(seed):
    g = generate_family("positive-closureAN", 1, seed=seed, kernel_dim=seed % 3)[0]
    n = 48
    form = positive_canonical_form(g.op, n)
    d = form.defects()
    norm = operator_norm(form.T)
    assert d["reassembly"] <= 1e-10 * norm
    assert d["k1_k2"] <= 1e-10 * max(operator_norm(form.K1) * operator_norm(form.K2), 1e-300)
    assert d["k1_below_alpha"] >= -1e-10 * norm
    again = redecompose(form)
    assert again.alpha == form.alpha
    assert operator_norm(again.K1 - form.K1) <= 1e-10 * norm
    assert operator_norm(again.K2 - form.K2) <= 1e-10 * norm


@given(seeds, st.integers(min_value=1, max_value=3))
def test_forced_kernel_lies_in_kernels_of_the_compact_parts(seed, kernel_dim):
    g = generate_family("positive-closureAN", 1, seed=seed, kernel_dim=kernel_dim)[0]
    form = positive_canonical_form(g.op, 40)
    a = analyze_positive_form(form)
    assert a.kernel_dim == kernel_dim and a.iff_holds
    assert a.k2_on_kernel <= 1e-10 and a.k1_on_kernel <= 1e-10


# -- quasinormal decompositions ------------------------------------------------------

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


def swap_plus_shift():
    profile = SpectralProfile(essential_points=(1.0,), upper=PointSet(((2.0, 2),)), alpha_in_point_spectrum=True,
                              alpha_eigenspace_dim=INF, cokernel_dim=1, classes=frozenset({"quasinormal"}))
    return direct_sum(scale(2, FiniteMatrix.from_array(SWAP)), unilateral_shift(), profile=profile)


def test_quasinormal_scaled_unitary_plus_shift():
    d = quasinormal_decompose(swap_plus_shift(), 32)
    assert [(b.scalar, b.dim) for b in d.upper_blocks] == [(2.0, 2)]
    assert d.upper_blocks[0].unitary_defect <= 1e-12
    assert d.isometry_kind == "proper-isometry"
    assert d.essential_block.isometry_defect <= 1e-12
    assert d.reassembly_error <= 1e-12 and d.lower_blocks == ()


def test_quasinormal_normal_diagonal():
    profile = SpectralProfile(essential_points=(1.0,), upper=PointSet(((2.0, 1),)), lower=PointSet(((0.5, 1),)),
                              alpha_in_point_spectrum=True, alpha_eigenspace_dim=INF, classes=frozenset({"normal"}))
    op = direct_sum(FiniteMatrix(((2, 0), (0, 0.5))), ScaledIdentity(1.0), profile=profile)
    d = quasinormal_decompose(op, 16)
    assert [b.scalar for b in d.upper_blocks] == [2.0] and [b.scalar for b in d.lower_blocks] == [0.5]
    assert d.isometry_kind == "unitary"
    assert normal_by_corollary(d, profile) == (False, True)


def test_quasinormal_compact_case_is_diagonal_unitary_blocks():
    profile = SpectralProfile(essential_points=(0.0,), upper=PointSet(tail=SequenceRule("1/k")),
                              classes=frozenset({"normal"}))
    op = DiagonalWithLimit(SequenceRule("1/k"), 0.0, declared_profile=profile)
    d = quasinormal_decompose(op, 24)
    assert len(d.upper_blocks) == 24 and d.essential_block is None
    assert all(b.dim == 1 and b.unitary_defect <= 1e-14 for b in d.upper_blocks)
    assert normal_by_corollary(d, profile) == (True, True)


def test_quasinormal_rejects_the_example():
    with pytest.raises(NotQuasinormal):
        quasinormal_decompose(odd_even_example(), 32)


def test_degenerate_cap_gives_single_essential_block():
    profile = SpectralProfile(essential_points=(2.0,), alpha_in_point_spectrum=True, alpha_eigenspace_dim=INF,
                              cokernel_dim=1, min_modulus=2.0, classes=frozenset({"quasinormal"}))
    op = replace(scale(2, unilateral_shift()), declared_profile=profile)
    d = quasinormal_decompose(op, 32)
    assert d.upper_blocks == () and d.lower_blocks == ()
    assert d.essential_block.scalar == 2.0 and d.essential_block.dim == 32
    assert d.reassembly_error <= 1e-14


def _block_scalars(blocks):
    return [(round(b.scalar, 9), b.dim) for b in blocks if b.kind != "kernel"]


@pytest.mark.parametrize("cls", ["quasinormal-AN", "quasinormal-AM", "quasinormal-closure"])
@pytest.mark.parametrize("essential", ["shift", "unitary"])
def test_quasinormal_generated_invariants(cls, essential):
    for g in generate_family(cls, 4, seed=11, essential=essential, kernel_dim=1):
        d = quasinormal_decompose(g.op, 40)
        assert d.reassembly_error <= 1e-10 * d.norm
        for b in d.upper_blocks + d.lower_blocks:
            if b.kind != "kernel":
                assert b.unitary_defect <= 1e-10
        assert d.essential_block.isometry_defect <= 1e-10
        expected_kind = "proper-isometry" if essential == "shift" else "unitary"
        assert d.isometry_kind == expected_kind
        # the construction scalars are recovered with their multiplicities
        found = _block_scalars(d.upper_blocks)
        for value, mult in g.upper:
            assert (round(value, 9), mult) in found
        # stable under a larger section
        bigger = quasinormal_decompose(g.op, 56)
        assert _block_scalars(bigger.upper_blocks)[:len(g.upper)] == found[:len(g.upper)]
        bases = [b.domain_basis for b in d.blocks]
        q = np.hstack(bases)
        assert np.linalg.norm(q.conj().T @ q - np.eye(q.shape[1]), 2) <= 1e-12


# -- hyponormal block form -----------------------------------------------------------


def test_example_block_form():
    n = 256
    form = hyponormal_block_form(odd_even_example(), n)
    assert form.alpha == 1.0
    assert max_principal_angle(form.H1_basis, coordinate_basis(n, range(0, n, 2))) < 1e-12
    assert max_principal_angle(form.H2_basis, coordinate_basis(n, range(1, n, 2))) < 1e-12
    assert form.H0_basis.shape[1] == 0
    nonzero = np.argwhere(np.abs(form.A) > 1e-12)
    assert len(nonzero) == 1
    assert abs(form.A[tuple(nonzero[0])]) == pytest.approx(math.sqrt(0.5), abs=1e-15)
    assert form.defects["v1_star_a"] <= 1e-10
    assert form.defects["gram_identity"] <= 1e-10
    assert form.defects["bb_star_dominated"] and form.defects["bb_star_min_margin"] >= -1e-10
    assert form.defects["reassembly"] <= 1e-12
    # B is the weighted shift with weights sqrt(1 - 1/(2k)), k >= 2
    sv = np.sort(np.linalg.svd(form.B, compute_uv=False))[::-1]
    weights = np.sqrt(1 - 1 / (2 * np.arange(2, n // 2 + 1)))
    assert np.allclose(sv[:len(weights)], weights[::-1], atol=1e-12)
    verdict = normality_from_blocks(form, source=odd_even_example())
    assert not verdict.normal and verdict.agrees


def test_normal_diagonal_block_form():
    t = np.diag([2.0, 1.0, 0.5])
    form = hyponormal_block_form(t, alpha=1.0, alpha_is_eigenvalue=True)
    assert np.allclose(form.V0, [[2]]) and np.allclose(form.V1, [[1]]) and np.allclose(form.B, [[0.5]])
    assert not np.any(np.abs(form.A) > 1e-15)
    verdict = normality_from_blocks(form, source=t)
    assert verdict.normal and verdict.agrees


def test_nilpotent_b_is_not_normal():
    form = hyponormal_block_form(np.diag([1.0, 0.5, 0.5]), alpha=1.0, alpha_is_eigenvalue=True)
    broken = replace(form, B=np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
    assert not normality_from_blocks(broken).normal
    assert normality_from_blocks(form).normal


def test_block_form_rejects_non_hyponormal():
    with pytest.raises(NotHyponormal):
        hyponormal_block_form(adjoint(unilateral_shift()), 16, alpha=1.0)


def test_generated_block_form_matches_projector_oracle():
    for g in generate_family("hyponormal-closure", 6, seed=3):
        n = 48
        form = hyponormal_block_form(g.op, n)
        c = np.array(column_section(g.op, n))
        # T*T is diagonal for this family, so H1 and H2 are coordinate subspaces
        d = np.real(np.diag(c.conj().T @ c))
        h1 = np.abs(d - g.alpha ** 2) <= 1e-9
        h0 = d > g.alpha ** 2 * (1 + 1e-9)
        h2 = ~(h1 | h0)
        m = c.shape[0]
        rows_h1 = np.zeros(m, dtype=bool)
        rows_h1[:n] = h1
        a_oracle = c[np.ix_(rows_h1, h2)]
        assert np.allclose(np.linalg.svd(form.A, compute_uv=False)[:1],
                           np.linalg.svd(a_oracle, compute_uv=False)[:1], atol=1e-12)
        assert form.H1_basis.shape[1] == h1.sum() and form.H2_basis.shape[1] == h2.sum()
        for key in ("v1_star_a", "gram_identity", "reassembly"):
            assert form.defects[key] <= 1e-10 * max(form.norm, 1) ** 2
        assert form.defects["bb_star_dominated"] and form.defects["v0_normal"] <= 1e-10
        q = np.hstack([form.H0_basis, form.H1_basis, form.H2_basis])
        assert np.linalg.norm(q.conj().T @ q - np.eye(q.shape[1]), 2) <= 1e-12
        assert not normality_from_blocks(form, source=g.op).normal


def test_adjoint_form_of_example_has_coisometry():
    f = adjoint_block_form(adjoint(odd_even_example()), 128)
    assert f.defects["s1_coisometry"] <= 1e-10
    assert f.defects["s1_a1_star"] <= 1e-10 and f.defects["gram_identity"] <= 1e-10
    assert f.defects["b1_star_b1_dominated"]


def test_adjoint_form_of_normal_toy():
    rng = np.random.default_rng(4)
    q = random_unitary(rng, 5)
    t = q @ np.diag([3.0, 2.0, 1.0, 1.0, 0.5]) @ q.conj().T
    f = adjoint_block_form(t, alpha=1.0)
    assert all(f.defects[k] <= 1e-10 for k in ("s1_coisometry", "s1_a1_star", "gram_identity", "reassembly"))


# -- inverse ------------------------------------------------------------------------


def test_inverse_of_scalar():
    r = invert_closure_an(np.eye(6) * 2.0, alpha=2.0)
    assert np.allclose(r.K3, 0, atol=1e-15)
    assert np.allclose(r.T_inverse, np.eye(6) / 2, atol=1e-15)


def test_inverse_rank_one_correction():
    r = invert_closure_an(np.diag([0.5, 1.0, 1.0, 1.0]), alpha=1.0)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    assert np.allclose(r.K3, expected, atol=1e-15)
    assert np.allclose(r.modulus_inverse, np.diag([2.0, 1, 1, 1]), atol=1e-15)


def test_inverse_against_dense_oracle():
    n = 64
    q = random_unitary(np.random.default_rng(9), n)
    t = q @ np.diag(1 + 1 / np.arange(1, n + 1))
    r = invert_closure_an(t, alpha=1.0)
    assert np.linalg.norm(r.T_inverse - np.linalg.inv(t), 2) <= 1e-12 * np.linalg.norm(r.T_inverse, 2)
    assert np.allclose(r.K3, np.diag(-1 / np.arange(2, n + 2)), atol=1e-14)
    assert r.modulus_defect <= 1e-12


def test_inverse_refusals():
    with pytest.raises(NotInvertible):
        invert_closure_an(unilateral_shift(), 16)
    with pytest.raises(NotInvertible):
        invert_closure_an(np.diag([1.0, 0.0]), alpha=1.0)
    with pytest.raises(AlphaZero):
        invert_closure_an(np.diag([1.0, 2.0]), alpha=0.0)
    with pytest.raises(AlphaZero):
        k3_from_form(_form(0.0, np.zeros((2, 2)), np.diag([1.0, 2.0])))


@given(seeds, st.sampled_from(["normal", "quasinormal-AN", "positive-closureAN"]))
def test_inverse_formula_property(seed, cls):
    params = {"essential": "unitary"} if cls.startswith("quasinormal") else {}
    g = generate_family(cls, 1, seed=seed, **params)[0]
    r = invert_closure_an(g.op, 48)
    assert r.modulus_defect <= 1e-9
    assert r.left_inverse_defect <= 1e-9 * max(1.0, operator_norm(r.T_inverse))
    assert r.oracle_defect <= 1e-9
