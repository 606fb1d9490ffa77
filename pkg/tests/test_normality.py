from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opstruct.errors import PremiseFailed, SpectrumUndeclared
from opstruct.generate import generate_family
from opstruct.model import (
    INF, DiagonalWithLimit, FiniteMatrix, PointSet, Region, ScaledIdentity, SequenceRule, SpectralProfile,
    SpectrumDescription, direct_sum, identity, odd_even_example, scale, unilateral_shift,
)
from opstruct.normality import (
    NormalityVerdict, check_compact_hyponormal_normal, check_equal_kernels_normal, check_invertible_normal,
    check_weyl_condition_normal, commutator_decay_study, putnam_bound,
)

DIMS = (32, 64, 128)
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_putnam_bound_examples():
    assert putnam_bound(SpectrumDescription(points=((1.0, 1), (2.0, INF)))) == 0.0
    assert putnam_bound(SpectrumDescription(regions=(Region.circle(1.0),))) == 0.0
    assert putnam_bound(SpectrumDescription(regions=(Region.disk(1.0),))) == 1.0
    assert putnam_bound(SpectrumDescription(regions=(Region.annulus(0.5, 1.0),))) == 0.75


def test_verdict_cannot_conclude_without_premise():
    with pytest.raises(ValueError):
        NormalityVerdict("Invertible", False, 0.0, True, (8,))
    with pytest.raises(PremiseFailed):
        NormalityVerdict("Invertible", False, 1.0, False, (8,), premises={"hyponormal": False}).require()


def test_invertible_examples():
    v = check_invertible_normal(identity(2.0), dims=DIMS)
    assert v.premise_holds and v.conclusion_normal and v.commutator_defect == 0.0
    profile = SpectralProfile(essential_points=(1.0,), upper=PointSet(tail=SequenceRule("1 + 1/k")),
                              min_modulus=1.0, classes=frozenset({"positive"}),
                              essential_spectrum=SpectrumDescription(points=((1.0, INF),)))
    pos = DiagonalWithLimit(SequenceRule("1 + 1/k"), 1.0, declared_profile=profile)
    v = check_invertible_normal(pos, dims=DIMS)
    assert v.premise_holds and v.conclusion_normal


def test_example_fails_invertible_premise():
    v = check_invertible_normal(odd_even_example(), dims=DIMS)
    assert not v.premise_holds and not v.conclusion_normal
    assert v.premises["surjective"] is False
    assert v.commutator_defect == pytest.approx(0.75, abs=1e-12)


def test_finite_matrix_route():
    v = check_invertible_normal(2 * SWAP)
    assert v.premise_holds and v.conclusion_normal
    zero_plus_swap = np.block([[np.zeros((2, 2)), np.zeros((2, 2))], [np.zeros((2, 2)), 2 * SWAP]])
    v = check_equal_kernels_normal(zero_plus_swap)
    assert v.premise_holds and v.conclusion_normal


def test_equal_kernels_examples():
    profile = SpectralProfile(essential_points=(1.0,), lower=PointSet(((0.0, 1),)), upper=PointSet(
        tail=SequenceRule("1 + 1/k")), kernel_dim=1, cokernel_dim=1, classes=frozenset({"positive"}),
        essential_spectrum=SpectrumDescription(points=((1.0, INF),)))
    op = DiagonalWithLimit(SequenceRule("0 if k == 1 else 1 + 1/k"), 1.0, declared_profile=profile)
    v = check_equal_kernels_normal(op, dims=DIMS)
    assert v.premise_holds and v.conclusion_normal
    s = check_equal_kernels_normal(unilateral_shift(), dims=DIMS)
    assert not s.premise_holds and not s.conclusion_normal


def test_weyl_examples():
    profile = SpectralProfile(essential_points=(1.0,), upper=PointSet(((2.0, 2),)), alpha_in_point_spectrum=True,
                              alpha_eigenspace_dim=INF, classes=frozenset({"normal"}),
                              essential_spectrum=SpectrumDescription(points=((1.0, INF),)))
    op = direct_sum(scale(2, FiniteMatrix.from_array(SWAP)), ScaledIdentity(1.0), profile=profile)
    v = check_weyl_condition_normal(op, dims=DIMS)
    assert v.premise_holds and v.conclusion_normal and v.commutator_defect == 0.0
    s = check_weyl_condition_normal(unilateral_shift(), dims=DIMS)
    assert not s.premise_holds
    assert all(abs(d - 1) <= 1e-12 for d in s.defects)
    with pytest.raises(SpectrumUndeclared):
        check_weyl_condition_normal(ScaledIdentity(1.0), dims=DIMS)


def test_weyl_premise_fails_on_scaled_unitary_plus_shift():
    g = generate_family("quasinormal-AN", 1, seed=5, essential="shift")[0]
    v = check_weyl_condition_normal(g.op, dims=DIMS)
    assert not v.premise_holds and not v.conclusion_normal


def test_compact_hyponormal():
    profile = SpectralProfile(essential_points=(0.0,), upper=PointSet(tail=SequenceRule("1/k")),
                              kernel_dim=0, classes=frozenset({"normal"}))
    v = check_compact_hyponormal_normal(DiagonalWithLimit(SequenceRule("1/k"), 0.0, declared_profile=profile),
                                        dims=DIMS)
    assert v.premise_holds and v.conclusion_normal
    assert not check_compact_hyponormal_normal(unilateral_shift(), dims=DIMS).premise_holds


def test_decay_study_examples():
    diag = commutator_decay_study(DiagonalWithLimit(SequenceRule("1/k"), 0.0), DIMS)
    assert all(r.full_defect == 0 and r.interior_defect == 0 for r in diag.rows) and diag.monotone
    shift = commutator_decay_study(unilateral_shift(), DIMS)
    assert all(r.full_defect == 1 and r.interior_defect == 1 for r in shift.rows)
    assert shift.to_csv().splitlines()[0] == "n,full_defect,interior_defect"


NORMAL_FAMILIES = [
    ("normal", {}),
    ("positive-closureAN", {}),
    ("quasinormal-AN", {"essential": "unitary"}),
    ("quasinormal-AM", {"essential": "unitary"}),
    ("quasinormal-closure", {"essential": "unitary"}),
]


@given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from(NORMAL_FAMILIES))
def test_premise_satisfying_families_conclude_normal(seed, family):
    cls, params = family
    g = generate_family(cls, 1, seed=seed, **params)[0]
    for check in (check_invertible_normal, check_equal_kernels_normal, check_weyl_condition_normal):
        v = check(g.op, dims=DIMS)
        assert v.premise_holds
        assert v.conclusion_normal and v.commutator_defect <= 1e-10 * v.norm ** 2


@given(st.integers(min_value=0, max_value=2**32 - 1),
       st.sampled_from([("quasinormal-AN", {"essential": "shift"}), ("quasinormal-closure", {"essential": "shift"}),
                        ("hyponormal-closure", {})]))
def test_counter_families_never_claim_normality(seed, family):
    cls, params = family
    g = generate_family(cls, 1, seed=seed, **params)[0]
    for check in (check_invertible_normal, check_equal_kernels_normal, check_weyl_condition_normal,
                  check_compact_hyponormal_normal):
        v = check(g.op, dims=DIMS)
        assert not v.premise_holds and not v.conclusion_normal
        assert v.commutator_defect > 1e-3
