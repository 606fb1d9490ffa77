"""Finite frames for spectral block decompositions.

A frame fixes a domain of n coordinates and a codomain of m >= n coordinates
such that T maps the domain exactly into the codomain. For an operator of
bandwidth b we take m = n + b and work with the column section
``C = T P_n`` (m x n): every quantity built from C (|T|, the polar factor,
T restricted to a spectral subspace) is then exact rather than a truncation
artifact. For a plain matrix, m = n and C is the matrix.

Spectral subspaces of |T| are computed on both sides: on the domain from C
and on the codomain from the column section at m. They are the spectral
subspaces of |T| itself whenever span{e_1..e_n} reduces T*T, which holds for
every family the generators build (finite blocks first, diagonal or shift tails).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..config import DEFAULT_TOL, ToleranceConfig
from ..errors import EssentialAmbiguity
from ..kernels import numerical_rank, operator_norm, svd
from ..model.operators import StructuredOperator, column_section, render


@dataclass(frozen=True)
class ModulusSpectrum:
    """Eigenvalues (ascending) and eigenvectors of |X| plus the polar factor of X."""

    values: np.ndarray
    vectors: np.ndarray
    W: np.ndarray


def modulus_spectrum(x: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> ModulusSpectrum:
    x = np.asarray(x, dtype=complex)
    gram = x.conj().T @ x
    if not np.any(gram - np.diag(np.diag(gram))):
        # mutually orthogonal columns: |X| is diagonal in the standard basis
        s = np.linalg.norm(x, axis=0)
        keep = s > tol.rank_tol * (s.max() if s.size else 0.0)
        w = np.zeros_like(x)
        w[:, keep] = x[:, keep] / s[keep]
        order = np.argsort(s, kind="stable")
        return ModulusSpectrum(s[order], np.eye(x.shape[1], dtype=complex)[:, order], w)
    u, s, v = svd(x)
    k = min(x.shape)
    r = numerical_rank(s, tol)
    w = u[:, :r] @ v[:, :r].conj().T
    vals = np.zeros(x.shape[1])
    vals[:k] = s[:k]
    order = np.argsort(vals, kind="stable")
    return ModulusSpectrum(vals[order], v[:, order], w)


@dataclass(frozen=True)
class Cluster:
    scalar: float
    indices: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.indices)


def cluster_values(values: np.ndarray, gap: float) -> list[Cluster]:
    """Group ascending values whose consecutive gaps are at most ``gap``."""
    out: list[list[int]] = []
    for i, v in enumerate(values):
        if out and v - values[out[-1][-1]] <= gap:
            out[-1].append(i)
        else:
            out.append([i])
    return [Cluster(float(np.mean(values[idx])), tuple(idx)) for idx in out]


def side_of(scalar: float, alpha: float, alpha_is_eigenvalue: bool, tol: ToleranceConfig) -> str:
    """'upper', 'essential' or 'lower' relative to the essential point alpha."""
    if abs(scalar - alpha) <= tol.cluster_gap:
        if alpha_is_eigenvalue:
            return "essential"
        if abs(scalar - alpha) <= 64 * np.finfo(float).eps * max(1.0, alpha):
            raise EssentialAmbiguity(
                f"eigenvalue {scalar!r} coincides with the essential point {alpha!r}, "
                "which is not declared as an eigenvalue")
    return "upper" if scalar > alpha else "lower"


class Frame:
    """Domain/codomain section of an operator or a plain square matrix."""

    def __init__(self, source, n: int | None = None, tol: ToleranceConfig = DEFAULT_TOL):
        self.tol = tol
        if isinstance(source, StructuredOperator):
            if n is None:
                raise ValueError("an operator frame needs a dimension")
            if source.dim is not None:
                n = min(n, source.dim)
            self.op = source
            b = source.bandwidth if source.dim is None else 0
            self.n, self.m = n, n + b
            self.C = np.array(column_section(source, n)[: self.m]) if b else np.array(render(source, n))
            self._cod_C = (np.array(column_section(source, self.m)) if b else self.C)
            self.R = np.array(render(source, self.m)[:n, :]) if b else self.C
        else:
            a = np.asarray(source, dtype=complex)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ValueError(f"expected a square matrix, got shape {a.shape}")
            self.op = None
            self.n = self.m = a.shape[0]
            self.C = self._cod_C = self.R = a

    @property
    def square(self) -> bool:
        return self.m == self.n

    @cached_property
    def norm(self) -> float:
        return operator_norm(self.C)

    @cached_property
    def domain(self) -> ModulusSpectrum:
        return modulus_spectrum(self.C, self.tol)

    @cached_property
    def codomain(self) -> ModulusSpectrum:
        if self.square:
            return self.domain
        return modulus_spectrum(self._cod_C, self.tol)

    def domain_basis(self, lo: float, hi: float) -> np.ndarray:
        d = self.domain
        return d.vectors[:, (d.values >= lo) & (d.values <= hi)]

    def codomain_basis(self, lo: float, hi: float) -> np.ndarray:
        c = self.codomain
        return c.vectors[:, (c.values >= lo) & (c.values <= hi)]

    def embed(self, q: np.ndarray) -> np.ndarray:
        """Domain vectors viewed in the codomain."""
        out = np.zeros((self.m, q.shape[1]), dtype=complex)
        out[: self.n] = q
        return out

    def row_gram(self) -> np.ndarray:
        """P_n T T* P_n on the domain coordinates (exact)."""
        return self.R @ self.R.conj().T

    def rows(self, q_cod: np.ndarray) -> np.ndarray:
        """P_n T applied to codomain vectors (exact)."""
        return self.R @ q_cod


def complement(basis: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(basis) in C^dim."""
    if basis.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    u, s, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, basis.shape[1]:]


def frame_norm(a: np.ndarray) -> float:
    return operator_norm(a) if a.size else 0.0
