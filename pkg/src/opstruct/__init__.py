"""Finite-section laboratory for operator structure theory on l2(N)."""

__version__ = "0.1.0"
