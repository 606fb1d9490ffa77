"""Ready-made operators with their declared profiles."""

from __future__ import annotations

import math

from .operators import Block2x2, DiagonalWithLimit, FiniteMatrix, ScaledIdentity, WeightedShift
from .profile import PointSet, SpectralProfile
from .rules import SequenceRule
from .spectrum import INF, Region, SpectrumDescription

SHIFT_PROFILE = SpectralProfile(
    essential_points=(1.0,),
    alpha_in_point_spectrum=True,
    alpha_eigenspace_dim=INF,
    kernel_dim=0,
    cokernel_dim=1,
    min_modulus=1.0,
    classes=frozenset({"quasinormal", "hyponormal"}),
    essential_spectrum=SpectrumDescription(regions=(Region.circle(1.0),)),
    nonzero_index_set=SpectrumDescription(regions=(Region.disk(1.0),)),
)


def unilateral_shift() -> WeightedShift:
    return WeightedShift(SequenceRule.const(1.0), declared_profile=SHIFT_PROFILE)


def identity(scalar: float = 1.0) -> ScaledIdentity:
    return ScaledIdentity(scalar, declared_profile=scalar_profile(scalar))


def scalar_profile(scalar: complex) -> SpectralProfile:
    """Profile of ``scalar * I`` on l2(N)."""
    a = abs(scalar)
    classes = {"normal", "quasinormal", "hyponormal"}
    if complex(scalar).imag == 0:
        classes.add("selfadjoint")
        if complex(scalar).real >= 0:
            classes.add("positive")
    return SpectralProfile(
        essential_points=(a,),
        alpha_in_point_spectrum=a > 0,
        alpha_eigenspace_dim=INF if a > 0 else 0,
        kernel_dim=INF if a == 0 else 0,
        cokernel_dim=INF if a == 0 else 0,
        min_modulus=a,
        classes=frozenset(classes),
        essential_spectrum=SpectrumDescription(points=((complex(scalar), INF),)),
    )


def even_coordinate_compact() -> DiagonalWithLimit:
    """K = diag(0, 1/2, 0, 1/4, 0, 1/6, ...)."""
    return DiagonalWithLimit(SequenceRule("1/k if k % 2 == 0 else 0"), 0.0)


ODD_EVEN_WEIGHTS = SequenceRule("0 if k == 1 else sqrt(1 - 1/(2*k))")

ODD_EVEN_PROFILE = SpectralProfile(
    essential_points=(1.0,),
    lower=PointSet(tail=SequenceRule("sqrt(1 - 1/(2*k))")),
    alpha_in_point_spectrum=True,
    alpha_eigenspace_dim=INF,
    kernel_dim=0,
    cokernel_dim=2,
    min_modulus=math.sqrt(0.5),
    classes=frozenset({"hyponormal"}),
    essential_spectrum=SpectrumDescription(regions=(Region.circle(1.0),)),
    nonzero_index_set=SpectrumDescription(regions=(Region.disk(1.0),)),
)


def odd_even_example() -> Block2x2:
    """Hyponormal, non-normal operator with T*T = I - K for the K above.

    Odd coordinates carry the unilateral shift e_{2k-1} -> e_{2k+1}; the first
    even coordinate is sent to sqrt(1/2) e_1, and e_{2k} -> sqrt(1 - 1/(2k)) e_{2k+2}
    for k >= 2. As a block operator on odd (+) even coordinates this is
    [[S, sqrt(1/2) e1 (x) e1], [0, B]] with B a weighted shift whose first weight is 0.
    """
    return Block2x2(
        blocks=(
            WeightedShift(SequenceRule.const(1.0)),
            FiniteMatrix(((math.sqrt(0.5),),)),
            None,
            WeightedShift(ODD_EVEN_WEIGHTS),
        ),
        sizes=(None, None),
        labels=("odd", "even"),
        declared_profile=ODD_EVEN_PROFILE,
    )
