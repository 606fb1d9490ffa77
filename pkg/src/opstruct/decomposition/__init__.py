"""Canonical forms and block decompositions."""

from .frame import Frame, cluster_values, modulus_spectrum
from .hyponormal import (AdjointBlockForm, BlockNormality, HyponormalBlockForm, adjoint_block_form,
                         hyponormal_block_form, normality_from_blocks)
from .inverse import InverseResult, invert_closure_an, k3_from_form
from .positive import (PositiveBlockReduction, PositiveCanonicalForm, analyze_positive_form,
                       block_reduce_positive, positive_canonical_form, redecompose, resolve_alpha)
from .quasinormal import QuasinormalDecomposition, SpectralBlock, normal_by_corollary, quasinormal_decompose

__all__ = [
    "AdjointBlockForm", "BlockNormality", "Frame", "HyponormalBlockForm", "InverseResult", "PositiveBlockReduction",
    "PositiveCanonicalForm", "QuasinormalDecomposition", "SpectralBlock", "adjoint_block_form",
    "analyze_positive_form", "block_reduce_positive", "cluster_values", "hyponormal_block_form", "invert_closure_an", "k3_from_form",
    "modulus_spectrum", "normal_by_corollary", "normality_from_blocks", "positive_canonical_form",
    "quasinormal_decompose", "redecompose", "resolve_alpha",
]
