from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opstruct.classification import (
    am_membership, an_membership, closure_an_membership, is_hyponormal_interior, symbolic_class,
)
from opstruct.errors import RecipeInfeasible
from opstruct.generate import (
    ESSENTIAL_KINDS, MIN_SEPARATION, RECIPE_CLASSES, GeneratorRecipe, generate, generate_family, random_unitary,
)
from opstruct.kernels import singular_values
from opstruct.model import column_section
from opstruct.model.opspec import parse, serialize

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_random_unitary_is_unitary():
    q = random_unitary(np.random.default_rng(0), 6)
    assert np.linalg.norm(q.conj().T @ q - np.eye(6), 2) <= 1e-14


def test_family_is_deterministic():
    a = [serialize(g.op) for g in generate_family("quasinormal-closure", 3, seed=42)]
    b = [serialize(g.op) for g in generate_family("quasinormal-closure", 3, seed=42)]
    c = [serialize(g.op) for g in generate_family("quasinormal-closure", 3, seed=43)]
    assert a == b and a != c


@pytest.mark.parametrize("cls", RECIPE_CLASSES)
def test_every_class_generates_and_round_trips(cls):
    for g in generate_family(cls, 3, seed=1):
        assert parse(serialize(g.op)) == g.op
        if g.profile.finite_dimensional:
            continue
        assert closure_an_membership(g.profile)
        assert g.profile.validate() == []


@pytest.mark.parametrize("essential", ESSENTIAL_KINDS)
def test_quasinormal_essential_kinds(essential):
    g = generate(GeneratorRecipe("quasinormal-closure", seed=3, essential=essential))
    assert symbolic_class(g.op, "quasinormal") is True
    assert symbolic_class(g.op, "normal") is (essential != "shift")


def test_memberships_follow_the_recipe():
    an = generate(GeneratorRecipe("quasinormal-AN", seed=2))
    am = generate(GeneratorRecipe("quasinormal-AM", seed=2))
    assert an_membership(an.profile) and am_membership(am.profile) and not an_membership(am.profile)


def test_explicit_scalars_and_infeasible_recipes():
    g = generate(GeneratorRecipe("quasinormal-AN", alpha=1.0, upper_scalars=(3.0, 2.0), lower_scalars=(0.5,)))
    assert [v for v, _ in g.upper] == [3.0, 2.0] and [v for v, _ in g.lower] == [0.5]
    with pytest.raises(RecipeInfeasible):
        generate(GeneratorRecipe("quasinormal-AN", alpha=1.0, upper_scalars=(0.5,)))
    with pytest.raises(RecipeInfeasible):
        GeneratorRecipe("nonsense")
    with pytest.raises(RecipeInfeasible):
        generate(GeneratorRecipe("quasinormal-AN", essential="none", alpha=1.0, tail_coefficient=1.5))
    with pytest.raises(RecipeInfeasible):
        generate(GeneratorRecipe("quasinormal-AM", upper_tail=True))
    with pytest.raises(RecipeInfeasible):
        generate(GeneratorRecipe("quasinormal-closure", alpha=1.0, tail_coefficient=0.5,
                                 lower_scalars=(1 - 0.25 + MIN_SEPARATION / 2,)))


def test_hyponormal_family_with_example_weights():
    g = generate(GeneratorRecipe("hyponormal-closure", alpha=1.0, tail_coefficient=1 - 1e-12, n_upper=0))
    c = np.array(column_section(g.op, 16))
    d = np.real(np.diag(c.conj().T @ c))
    assert np.allclose(d[1::2][1:], 1 - (1 - 1e-12) / (2 * np.arange(2, 9)), atol=1e-12)
    assert is_hyponormal_interior(g.op, 64).holds


@given(seeds, st.sampled_from(RECIPE_CLASSES), st.integers(min_value=0, max_value=2))
def test_generated_samples_are_self_certifying(seed, cls, kernel_dim):
    g = generate(GeneratorRecipe(cls, seed=seed, kernel_dim=kernel_dim if cls.startswith(("pos", "quasi")) else 0))
    if g.profile.finite_dimensional:
        assert g.profile.min_modulus == pytest.approx(singular_values(np.array(column_section(g.op, g.op.dim)))[-1])
        return
    assert g.profile.validate() == []
    assert is_hyponormal_interior(g.op, 64).holds
    # declared finite spectral values of |T| show up in the section
    s = singular_values(np.array(column_section(g.op, 64)))
    for value, _ in g.upper + g.lower:
        assert np.min(np.abs(s - value)) <= 1e-10 * max(1.0, value)
