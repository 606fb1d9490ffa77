from .library import identity, odd_even_example, scalar_profile, unilateral_shift
from .operators import (
    Adjoint, Block2x2, Compose, DiagonalWithLimit, DirectSum, FiniteMatrix, InterleavedEmbedding, Scale,
    ScaledIdentity, StructuredOperator, Sum, WeightedShift, add, adjoint, column_section, compose, direct_sum,
    render, row_section, scale,
)
from .profile import PointSet, SpectralProfile
from .rules import SequenceRule
from .spectrum import EMPTY, INF, IsolatedPoint, Region, SpectrumDescription
