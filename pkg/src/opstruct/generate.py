"""Randomized operator families with exact declared profiles.

Every recipe builds an operator forward from its spectral data (unitary
blocks on eigenspaces of |T|, an isometry at the essential point, diagonal
tails accumulating at it), so the declared profile is exact by construction.
Each generated operator passes its own class predicate in symbolic mode
before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .classification import am_membership, an_membership, closure_an_membership, symbolic_class
from .config import DEFAULT_TOL, ToleranceConfig
from .errors import RecipeInfeasible
from .model.operators import (
    Block2x2, DiagonalWithLimit, FiniteMatrix, ScaledIdentity, StructuredOperator, WeightedShift, direct_sum,
    scale,
)
from .model.profile import PointSet, SpectralProfile
from .model.rules import SequenceRule
from .model.spectrum import INF, Region, SpectrumDescription

RECIPE_CLASSES = ("positive-closureAN", "quasinormal-AN", "quasinormal-AM", "quasinormal-closure",
                  "hyponormal-closure", "normal", "finite-random")
ESSENTIAL_KINDS = ("shift", "unitary", "none")
MIN_SEPARATION = 1e-3

_PREDICATE = {
    "positive-closureAN": "positive", "quasinormal-AN": "quasinormal", "quasinormal-AM": "quasinormal",
    "quasinormal-closure": "quasinormal", "hyponormal-closure": "hyponormal", "normal": "normal",
}
_QUASINORMAL_CLASSES = frozenset({"quasinormal", "hyponormal"})
_NORMAL_CLASSES = frozenset({"normal", "quasinormal", "hyponormal"})
_POSITIVE_CLASSES = frozenset({"positive", "selfadjoint", "normal", "quasinormal", "hyponormal"})


@dataclass(frozen=True)
class GeneratorRecipe:
    cls: str
    seed: int = 0
    alpha: float | None = None
    upper_scalars: tuple[float, ...] | None = None
    lower_scalars: tuple[float, ...] | None = None
    n_upper: int = 2
    n_lower: int = 2
    block_max: int = 3
    essential: str = "shift"
    kernel_dim: int = 0
    tail_coefficient: float | None = None
    upper_tail: bool = False
    size: int = 8
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.cls not in RECIPE_CLASSES:
            raise RecipeInfeasible(f"unknown recipe class {self.cls!r}; expected one of {RECIPE_CLASSES}")
        if self.essential not in ESSENTIAL_KINDS:
            raise RecipeInfeasible(f"essential part must be one of {ESSENTIAL_KINDS}")
        if self.kernel_dim < 0 or self.n_upper < 0 or self.n_lower < 0 or self.block_max < 1:
            raise RecipeInfeasible("counts must be non-negative and blocks non-empty")


@dataclass(frozen=True)
class Generated:
    op: StructuredOperator
    recipe: GeneratorRecipe
    upper: tuple[tuple[float, int], ...]
    lower: tuple[tuple[float, int], ...]
    alpha: float | None

    @property
    def profile(self) -> SpectralProfile:
        return self.op.declared_profile


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar unitary from the QR factorization of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _phase(rng: np.random.Generator) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def _distinct(rng, count, lo, hi, avoid=()) -> tuple[float, ...]:
    """Sorted values in (lo, hi), pairwise and from ``avoid`` more than MIN_SEPARATION apart."""
    if count == 0:
        return ()
    if (hi - lo) <= (count + len(avoid) + 1) * MIN_SEPARATION * 4:
        raise RecipeInfeasible(f"cannot place {count} separated values in ({lo}, {hi})")
    out: list[float] = []
    while len(out) < count:
        v = float(rng.uniform(lo, hi))
        if min((abs(v - w) for w in list(out) + list(avoid) + [lo, hi]), default=1.0) > MIN_SEPARATION:
            out.append(v)
    return tuple(sorted(out))


def _block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def _check_scalars(values, lo, hi, what):
    for v in values:
        if not lo < v < hi:
            raise RecipeInfeasible(f"{what} scalar {v} outside ({lo}, {hi})")
    vals = sorted(values)
    if any(b - a <= MIN_SEPARATION for a, b in zip(vals, vals[1:])):
        raise RecipeInfeasible(f"{what} scalars must be separated by more than {MIN_SEPARATION}")


def _draw(recipe: GeneratorRecipe, rng, upper_tail: bool = False, lower_tail: bool = False):
    """Essential point, finite upper and lower scalars and the tail coefficient.

    Finite scalars are kept clear of the tails (above the first upper tail
    term, below the first lower one) so that every spectral value is simple
    to attribute.
    """
    alpha = recipe.alpha if recipe.alpha is not None else float(rng.uniform(0.5, 2.0))
    if alpha <= 0:
        raise RecipeInfeasible("these families need a positive essential point")
    c = recipe.tail_coefficient if recipe.tail_coefficient is not None else float(rng.uniform(0.2, 0.8))
    if not 0 < c < 1:
        raise RecipeInfeasible("tail coefficient must lie in (0, 1)")
    up_lo = alpha * (1 + c) if upper_tail else alpha
    low_hi = alpha * (1 - c / 2) if lower_tail else alpha
    if recipe.upper_scalars is not None:
        upper = tuple(sorted(recipe.upper_scalars))
        _check_scalars(upper, up_lo + (MIN_SEPARATION if upper_tail else 0.0), math.inf, "upper")
    else:
        upper = _distinct(rng, recipe.n_upper, up_lo + 0.05, up_lo + 2.0)
    if recipe.lower_scalars is not None:
        lower = tuple(sorted(recipe.lower_scalars))
        _check_scalars(lower, 0.0, low_hi - (MIN_SEPARATION if lower_tail else 0.0), "lower")
    else:
        lower = _distinct(rng, recipe.n_lower, 0.05 * alpha, low_hi - 0.05 * alpha)
    return alpha, upper, lower, c


def _unitary_blocks(rng, scalars, block_max, normal_only=False):
    """Blocks a_i U_i with U_i a random unitary of random size; returns blocks and multiplicities."""
    blocks, mults = [], []
    for a in scalars:
        k = int(rng.integers(1, block_max + 1))
        blocks.append(a * random_unitary(rng, k))
        mults.append((a, k))
    return blocks, mults


def _tail_rule(alpha: float, c: float, side: str) -> SequenceRule:
    """Strictly monotone sequence accumulating at alpha from above or below."""
    if side == "upper":
        return SequenceRule(f"{alpha!r} * (1 + {c!r} / k)")
    return SequenceRule(f"{alpha!r} * (1 - {c!r} / (k + 1))")


def _essential_spectrum(points: list[complex], circles: list[float]) -> SpectrumDescription:
    return SpectrumDescription(tuple((z, INF) for z in points), tuple(Region.circle(r) for r in circles)).normalized()


def _quasinormal(recipe: GeneratorRecipe, rng) -> Generated:
    variant = recipe.cls.split("-")[1]
    upper_tail = recipe.upper_tail or variant == "closure" or (variant == "AN" and recipe.essential == "none")
    lower_tail = variant in ("AM", "closure")
    if variant == "AM" and recipe.upper_tail:
        raise RecipeInfeasible("an AM recipe cannot carry infinitely many upper points")
    alpha, upper, lower, c = _draw(recipe, rng, upper_tail, lower_tail)
    blocks, up_m = _unitary_blocks(rng, upper, recipe.block_max)
    low_blocks, low_m = _unitary_blocks(rng, lower, recipe.block_max)
    blocks += low_blocks
    if recipe.kernel_dim:
        blocks.append(np.zeros((recipe.kernel_dim, recipe.kernel_dim), dtype=complex))
    parts: list[StructuredOperator] = []
    if blocks:
        parts.append(FiniteMatrix.from_array(_block_diag(blocks)))
    ess_points: list[complex] = []
    circles: list[float] = []
    index_set = SpectrumDescription()
    cokernel = recipe.kernel_dim
    if recipe.essential == "shift":
        parts.append(scale(alpha, WeightedShift(SequenceRule.const(1.0))))
        circles.append(alpha)
        index_set = SpectrumDescription(regions=(Region.disk(alpha),))
        cokernel += 1
    elif recipe.essential == "unitary":
        z = alpha * _phase(rng)
        parts.append(ScaledIdentity(z))
        ess_points.append(z)
    up_rule = low_rule = None
    if upper_tail:
        up_rule = _tail_rule(alpha, c, "upper")
        z = _phase(rng)
        parts.append(scale(z, DiagonalWithLimit(up_rule, alpha)))
        ess_points.append(alpha * z)
    if lower_tail:
        low_rule = _tail_rule(alpha, c, "lower")
        z = _phase(rng)
        parts.append(scale(z, DiagonalWithLimit(low_rule, alpha)))
        ess_points.append(alpha * z)
    if not parts or (recipe.essential == "none" and not upper_tail and not lower_tail):
        raise RecipeInfeasible("the recipe has no infinite part")
    kernel_pts = ((0.0, recipe.kernel_dim),) if recipe.kernel_dim else ()
    lower_ps = PointSet(tuple(low_m) + kernel_pts, low_rule)
    upper_ps = PointSet(tuple(up_m), up_rule)
    alpha_dim = INF if recipe.essential != "none" else 0
    normal = recipe.essential != "shift"
    profile = SpectralProfile(
        essential_points=(alpha,), upper=upper_ps, lower=lower_ps,
        alpha_in_point_spectrum=alpha_dim != 0, alpha_eigenspace_dim=alpha_dim,
        kernel_dim=recipe.kernel_dim, cokernel_dim=cokernel, min_modulus=None,
        classes=_NORMAL_CLASSES if normal else _QUASINORMAL_CLASSES,
        essential_spectrum=_essential_spectrum(ess_points, circles), nonzero_index_set=index_set,
    )
    profile = replace(profile, min_modulus=profile.declared_min_modulus())
    op = direct_sum(*parts, profile=profile) if len(parts) > 1 else replace(parts[0], declared_profile=profile)
    return Generated(op, recipe, tuple(sorted(up_m, key=lambda p: -p[0])), tuple(sorted(low_m, key=lambda p: -p[0])),
                     alpha)


def _positive(recipe: GeneratorRecipe, rng) -> Generated:
    side = recipe.extra.get("tail_side", "upper" if np.random.default_rng(recipe.seed).random() < 0.5 else "lower")
    alpha, upper, lower, c = _draw(recipe, rng, side == "upper", side == "lower")
    vals = list(upper) + list(lower) + [0.0] * recipe.kernel_dim
    parts: list[StructuredOperator] = []
    if vals:
        q = random_unitary(rng, len(vals))
        a = (q * np.array(vals)) @ q.conj().T
        parts.append(FiniteMatrix.from_array((a + a.conj().T) / 2))
    rule = _tail_rule(alpha, c, side) if side in ("upper", "lower") else None
    if rule is not None:
        parts.append(DiagonalWithLimit(rule, alpha))
    alpha_dim = 0
    if recipe.essential != "none" or rule is None:
        parts.append(ScaledIdentity(alpha))
        alpha_dim = INF
    kernel_pts = ((0.0, recipe.kernel_dim),) if recipe.kernel_dim else ()
    profile = SpectralProfile(
        essential_points=(alpha,),
        upper=PointSet(tuple((v, 1) for v in upper), rule if side == "upper" else None),
        lower=PointSet(tuple((v, 1) for v in lower) + kernel_pts, rule if side == "lower" else None),
        alpha_in_point_spectrum=alpha_dim != 0, alpha_eigenspace_dim=alpha_dim,
        kernel_dim=recipe.kernel_dim, cokernel_dim=recipe.kernel_dim, classes=_POSITIVE_CLASSES,
        essential_spectrum=_essential_spectrum([alpha], []),
    )
    profile = replace(profile, min_modulus=profile.declared_min_modulus())
    op = direct_sum(*parts, profile=profile) if len(parts) > 1 else replace(parts[0], declared_profile=profile)
    return Generated(op, recipe, tuple((v, 1) for v in sorted(upper, reverse=True)),
                     tuple((v, 1) for v in sorted(lower, reverse=True)), alpha)


def _normal(recipe: GeneratorRecipe, rng) -> Generated:
    """Unitarily conjugated complex diagonal head plus a scalar unitary tail at alpha."""
    alpha, upper, lower, c = _draw(recipe, rng)
    mods = list(upper) + list(lower)
    phases = [_phase(rng) for _ in mods]
    parts: list[StructuredOperator] = []
    if mods:
        q = random_unitary(rng, len(mods))
        parts.append(FiniteMatrix.from_array((q * (np.array(mods) * np.array(phases))) @ q.conj().T))
    z = alpha * _phase(rng)
    parts.append(ScaledIdentity(z))
    profile = SpectralProfile(
        essential_points=(alpha,), upper=PointSet(tuple((v, 1) for v in upper)),
        lower=PointSet(tuple((v, 1) for v in lower)), alpha_in_point_spectrum=True, alpha_eigenspace_dim=INF,
        kernel_dim=0, cokernel_dim=0, classes=_NORMAL_CLASSES, essential_spectrum=_essential_spectrum([z], []),
    )
    profile = replace(profile, min_modulus=profile.declared_min_modulus())
    op = direct_sum(*parts, profile=profile)
    return Generated(op, recipe, tuple((v, 1) for v in sorted(upper, reverse=True)),
                     tuple((v, 1) for v in sorted(lower, reverse=True)), alpha)


def _hyponormal(recipe: GeneratorRecipe, rng) -> Generated:
    """[[alpha S, b_1 e_1 (x) e_1], [0, B]] on odd (+) even coordinates, plus a normal head.

    B is the weighted shift with weights 0, b_2, b_3, ... where b_k increases
    strictly to alpha, so T*T is diagonal with alpha on the odd coordinates and
    b_k^2 on the even ones, and T*T - TT* = diag(alpha^2 - b_1^2, 0, ...) (+)
    diag(b_{k+1}^2 - b_k^2) is positive while T is not normal.
    """
    alpha = recipe.alpha if recipe.alpha is not None else float(rng.uniform(0.5, 2.0))
    if alpha <= 0:
        raise RecipeInfeasible("the hyponormal family needs a positive essential point")
    c = recipe.tail_coefficient if recipe.tail_coefficient is not None else float(rng.uniform(0.2, 0.8))
    if not 0 < c < 1:
        raise RecipeInfeasible("tail coefficient must lie in (0, 1)")
    shift_k = recipe.extra.get("tail_offset", 0)
    beta = f"{alpha!r} * sqrt(1 - {c!r} / (2 * (k + {shift_k!r})))" if shift_k else f"{alpha!r} * sqrt(1 - {c!r} / (2 * k))"
    beta_rule = SequenceRule(beta)
    b1 = float(beta_rule(1).real)
    weights = SequenceRule(f"0 if k == 1 else {beta}")
    core = Block2x2(
        blocks=(scale(alpha, WeightedShift(SequenceRule.const(1.0))) if alpha != 1 else WeightedShift(SequenceRule.const(1.0)),
                FiniteMatrix(((b1,),)), None, WeightedShift(weights)),
        sizes=(None, None), labels=("odd", "even"),
    )
    if recipe.upper_scalars is not None:
        upper = tuple(sorted(recipe.upper_scalars))
        _check_scalars(upper, alpha, math.inf, "upper")
    else:
        upper = _distinct(rng, recipe.n_upper, alpha + 0.05, alpha + 2.0)
    blocks, up_m = _unitary_blocks(rng, upper, recipe.block_max)
    profile = SpectralProfile(
        essential_points=(alpha,), upper=PointSet(tuple(up_m)), lower=PointSet(tail=beta_rule),
        alpha_in_point_spectrum=True, alpha_eigenspace_dim=INF, kernel_dim=0, cokernel_dim=2,
        classes=frozenset({"hyponormal"}), essential_spectrum=_essential_spectrum([], [alpha]),
        nonzero_index_set=SpectrumDescription(regions=(Region.disk(alpha),)),
    )
    profile = replace(profile, min_modulus=profile.declared_min_modulus())
    if blocks:
        op = direct_sum(FiniteMatrix.from_array(_block_diag(blocks)), core, profile=profile)
    else:
        op = replace(core, declared_profile=profile)
    return Generated(op, recipe, tuple(sorted(up_m, key=lambda p: -p[0])), (), alpha)


def _finite_random(recipe: GeneratorRecipe, rng) -> Generated:
    n = recipe.size
    if n < 1:
        raise RecipeInfeasible("size must be positive")
    a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2 * n)
    op = FiniteMatrix.from_array(a)
    s = np.linalg.svd(a, compute_uv=False)
    profile = SpectralProfile(finite_dimensional=True, min_modulus=float(s[-1]))
    return Generated(replace(op, declared_profile=profile), recipe, (), (), None)


_BUILDERS = {
    "positive-closureAN": _positive, "quasinormal-AN": _quasinormal, "quasinormal-AM": _quasinormal,
    "quasinormal-closure": _quasinormal, "hyponormal-closure": _hyponormal, "normal": _normal,
    "finite-random": _finite_random,
}


def self_check(gen: Generated, tol: ToleranceConfig = DEFAULT_TOL) -> None:
    """Symbolic class predicate, membership and profile consistency; raises RecipeInfeasible."""
    recipe = gen.recipe
    profile = gen.profile
    problems = profile.validate() if not profile.finite_dimensional else []
    name = _PREDICATE.get(recipe.cls)
    if name is not None and symbolic_class(gen.op, name, tol) is not True:
        problems.append(f"symbolic {name} predicate does not hold")
    if recipe.cls == "quasinormal-AN" and not an_membership(profile):
        problems.append("not in AN")
    if recipe.cls == "quasinormal-AM" and not am_membership(profile):
        problems.append("not in AM")
    if not closure_an_membership(profile):
        problems.append("not in the closure of AN")
    if problems:
        raise RecipeInfeasible(f"{recipe.cls} sample fails its self-check: {'; '.join(problems)}")


def generate(recipe: GeneratorRecipe, tol: ToleranceConfig = DEFAULT_TOL) -> Generated:
    rng = np.random.default_rng(np.random.SeedSequence(recipe.seed))
    gen = _BUILDERS[recipe.cls](recipe, rng)
    self_check(gen, tol)
    return gen


def generate_family(cls: str, count: int, seed: int = 0, **params) -> list[Generated]:
    """``count`` independent samples whose seeds are spawned from one root seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [generate(GeneratorRecipe(cls, seed=int(ch.generate_state(1, dtype=np.uint64)[0]), **params))
            for ch in children]
