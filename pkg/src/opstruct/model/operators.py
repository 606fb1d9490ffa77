"""Symbolic operators on l2(N) and their finite sections.

Every operator is an immutable AST node. ``render(op, n)`` returns the exact
compression ``P_n T P_n`` onto span{e_1..e_n} as a dense complex array. A node
with ``dim`` set acts on C^dim instead of l2(N); rendering it larger than
``dim`` pads with zeros.

Direct sums and 2x2 block operators share one coordinate layout: finite
summands occupy the leading coordinates in list order, infinite summands are
then interleaved round-robin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import DimensionMismatch, ShapeMismatch
from .profile import SpectralProfile
from .rules import SequenceRule


@dataclass(frozen=True)
class StructuredOperator:
    declared_profile: SpectralProfile | None = field(default=None, kw_only=True)

    kind = "abstract"

    @property
    def dim(self) -> int | None:
        """Dimension of the underlying space, None for l2(N)."""
        return None

    @property
    def bandwidth(self) -> int:
        raise NotImplementedError

    def children(self) -> tuple["StructuredOperator", ...]:
        return ()

    def _render(self, n: int, strict: bool) -> np.ndarray:
        raise NotImplementedError


def render(op: StructuredOperator, n: int, strict: bool = False) -> np.ndarray:
    """Exact n x n compression of ``op`` (read-only, cached)."""
    if int(n) != n or n < 1:
        raise ValueError(f"render dimension must be a positive integer, got {n}")
    return _render_cached(op, int(n), strict)


@lru_cache(maxsize=1024)
def _render_cached(op: StructuredOperator, n: int, strict: bool) -> np.ndarray:
    out = np.ascontiguousarray(op._render(n, strict), dtype=complex)
    out.flags.writeable = False
    return out


def column_section(op: StructuredOperator, n: int) -> np.ndarray:
    """``T P_n`` as an (n+b) x n array: the first n columns of T, complete."""
    return render(op, n + op.bandwidth)[:, :n]


def row_section(op: StructuredOperator, n: int) -> np.ndarray:
    """``P_n T`` as an n x (n+b) array: the first n rows of T, complete."""
    return render(op, n + op.bandwidth)[:n, :]


# -- coordinate layout shared by direct sums and block operators -------------------


@dataclass(frozen=True)
class _Layout:
    sizes: tuple[int | None, ...]

    @property
    def finite_total(self) -> int:
        return sum(s for s in self.sizes if s is not None)

    @property
    def infinite(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.sizes) if s is None)

    @property
    def total(self) -> int | None:
        return None if self.infinite else self.finite_total

    def start(self, i: int) -> int:
        if self.sizes[i] is not None:
            return sum(s for s in self.sizes[:i] if s is not None)
        return self.finite_total + self.infinite.index(i)

    def stride(self, i: int) -> int:
        return 1 if self.sizes[i] is not None else len(self.infinite)

    def pos(self, i: int, local: int) -> int:
        return self.start(i) + self.stride(i) * local

    def indices(self, n: int) -> list[np.ndarray]:
        out = []
        for i, s in enumerate(self.sizes):
            start = self.start(i)
            stop = n if s is None else min(n, start + s)
            out.append(np.arange(start, stop, self.stride(i)) if start < stop else np.arange(0))
        return out

    def band(self, i: int, j: int, op: StructuredOperator) -> int:
        """Upper bound on |global row - global col| over the support of block (i, j)."""
        b = op.bandwidth
        limits = [s for s in (self.sizes[i], self.sizes[j], op.dim) if s is not None]
        if not limits:
            return self.stride(i) * b + abs(self.start(i) - self.start(j))
        row_limits = [s for s in (self.sizes[i], op.dim) if s is not None]
        r_max = min(row_limits) if row_limits else self.sizes[j] + b
        best = 0
        for r in range(r_max):
            for c in range(max(0, r - b), r + b + 1):
                if self.sizes[j] is not None and c >= self.sizes[j]:
                    break
                if op.dim is not None and c >= op.dim:
                    break
                best = max(best, abs(self.pos(i, r) - self.pos(j, c)))
        return best


def _part_dim(op: StructuredOperator | None) -> int | None:
    return None if op is None else op.dim


# -- leaf kinds ------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledIdentity(StructuredOperator):
    scalar: complex = 1.0
    size: int | None = None

    kind = "ScaledIdentity"

    @property
    def dim(self):
        return self.size

    @property
    def bandwidth(self):
        return 0

    def _render(self, n, strict):
        _check_strict(self, n, strict)
        d = np.zeros(n, dtype=complex)
        d[: n if self.size is None else min(n, self.size)] = self.scalar
        return np.diag(d)


@dataclass(frozen=True)
class DiagonalWithLimit(StructuredOperator):
    """diag(d_1, d_2, ...) with d_k -> limit."""

    entries: SequenceRule = None
    limit: float = 0.0

    kind = "DiagonalWithLimit"

    @property
    def bandwidth(self):
        return 0

    def _render(self, n, strict):
        return np.diag(self.entries.evaluate(n))


@dataclass(frozen=True)
class WeightedShift(StructuredOperator):
    """``e_k -> w_k e_{k+1}``."""

    weights: SequenceRule = None

    kind = "WeightedShift"

    @property
    def bandwidth(self):
        return 1

    def _render(self, n, strict):
        out = np.zeros((n, n), dtype=complex)
        if n > 1:
            idx = np.arange(n - 1)
            out[idx + 1, idx] = self.weights.evaluate(n - 1)
        return out


@dataclass(frozen=True)
class FiniteMatrix(StructuredOperator):
    entries: tuple[tuple[complex, ...], ...] = ()

    kind = "FiniteMatrix"

    def __post_init__(self):
        rows = tuple(tuple(complex(x) for x in row) for row in self.entries)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ShapeMismatch("FiniteMatrix entries must form a non-empty square array")
        if not all(math.isfinite(x.real) and math.isfinite(x.imag) for r in rows for x in r):
            raise ShapeMismatch("FiniteMatrix entries must be finite")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_array(cls, a, **kw) -> "FiniteMatrix":
        return cls(tuple(tuple(complex(x) for x in row) for row in np.asarray(a)), **kw)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex)

    @property
    def dim(self):
        return len(self.entries)

    @property
    def bandwidth(self):
        nz = np.nonzero(self.array)
        return int(np.max(np.abs(nz[0] - nz[1]))) if len(nz[0]) else 0

    def _render(self, n, strict):
        _check_strict(self, n, strict)
        out = np.zeros((n, n), dtype=complex)
        d = min(n, self.dim)
        out[:d, :d] = self.array[:d, :d]
        return out


def _check_strict(op, n, strict):
    if strict and op.dim is not None and op.dim > n:
        raise DimensionMismatch(f"{op.kind} of dimension {op.dim} does not fit in a {n}x{n} section")


# -- composite kinds ----------------------------------------------------------------


@dataclass(frozen=True)
class DirectSum(StructuredOperator):
    parts: tuple[StructuredOperator, ...] = ()

    kind = "DirectSum"

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ShapeMismatch("direct sum needs at least one part")

    @property
    def layout(self) -> _Layout:
        return _Layout(tuple(p.dim for p in self.parts))

    @property
    def dim(self):
        return self.layout.total

    @property
    def bandwidth(self):
        lay = self.layout
        return max(lay.band(i, i, p) for i, p in enumerate(self.parts))

    def children(self):
        return self.parts

    def _render(self, n, strict):
        out = np.zeros((n, n), dtype=complex)
        for part, idx in zip(self.parts, self.layout.indices(n)):
            if len(idx):
                out[np.ix_(idx, idx)] = render(part, len(idx), strict)
        return out


@dataclass(frozen=True)
class Block2x2(StructuredOperator):
    """[[T11, T12], [T21, T22]] on H1 (+) H2; block (i, j) maps H_j into H_i.

    ``sizes`` gives dim H1 and dim H2 (None for infinite); ``labels`` name the
    two summands in reports. A None block is zero.
    """

    blocks: tuple = (None, None, None, None)
    sizes: tuple[int | None, int | None] = (None, None)
    labels: tuple[str, str] = ("H1", "H2")

    kind = "Block2x2"

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "sizes", tuple(self.sizes))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.blocks) != 4 or len(self.sizes) != 2 or len(self.labels) != 2:
            raise ShapeMismatch("Block2x2 needs four blocks, two sizes and two labels")
        for (i, j), b in zip(((0, 0), (0, 1), (1, 0), (1, 1)), self.blocks):
            if b is None:
                continue
            if b.dim is None and (self.sizes[i] is not None or self.sizes[j] is not None):
                raise ShapeMismatch(f"infinite block ({i + 1},{j + 1}) on a finite summand")

    @property
    def layout(self) -> _Layout:
        return _Layout(self.sizes)

    @property
    def dim(self):
        return self.layout.total

    @property
    def bandwidth(self):
        lay = self.layout
        return max((lay.band(i, j, b) for (i, j), b in zip(((0, 0), (0, 1), (1, 0), (1, 1)), self.blocks)
                    if b is not None), default=0)

    def children(self):
        return tuple(b for b in self.blocks if b is not None)

    def _render(self, n, strict):
        out = np.zeros((n, n), dtype=complex)
        idx = self.layout.indices(n)
        for (i, j), b in zip(((0, 0), (0, 1), (1, 0), (1, 1)), self.blocks):
            if b is None or not len(idx[i]) or not len(idx[j]):
                continue
            r, c = len(idx[i]), len(idx[j])
            out[np.ix_(idx[i], idx[j])] = render(b, max(r, c), strict)[:r, :c]
        return out


@dataclass(frozen=True)
class Adjoint(StructuredOperator):
    inner: StructuredOperator = None

    kind = "Adjoint"

    @property
    def dim(self):
        return self.inner.dim

    @property
    def bandwidth(self):
        return self.inner.bandwidth

    def children(self):
        return (self.inner,)

    def _render(self, n, strict):
        return render(self.inner, n, strict).conj().T


@dataclass(frozen=True)
class Compose(StructuredOperator):
    """``left @ right``; rendered as the true compression P_n L R P_n."""

    left: StructuredOperator = None
    right: StructuredOperator = None

    kind = "Compose"

    @property
    def dim(self):
        return self.left.dim

    @property
    def bandwidth(self):
        return self.left.bandwidth + self.right.bandwidth

    def children(self):
        return (self.left, self.right)

    def _render(self, n, strict):
        m = n + self.right.bandwidth
        return render(self.left, m, strict)[:n, :] @ render(self.right, m, strict)[:, :n]


@dataclass(frozen=True)
class Sum(StructuredOperator):
    left: StructuredOperator = None
    right: StructuredOperator = None

    kind = "Sum"

    @property
    def dim(self):
        return self.left.dim

    @property
    def bandwidth(self):
        return max(self.left.bandwidth, self.right.bandwidth)

    def children(self):
        return (self.left, self.right)

    def _render(self, n, strict):
        return render(self.left, n, strict) + render(self.right, n, strict)


@dataclass(frozen=True)
class Scale(StructuredOperator):
    scalar: complex = 1.0
    inner: StructuredOperator = None

    kind = "Scale"

    @property
    def dim(self):
        return self.inner.dim

    @property
    def bandwidth(self):
        return self.inner.bandwidth

    def children(self):
        return (self.inner,)

    def _render(self, n, strict):
        return self.scalar * render(self.inner, n, strict)


@dataclass(frozen=True)
class InterleavedEmbedding(StructuredOperator):
    """``inner`` acting on the coordinates offset, offset+stride, ...; zero elsewhere."""

    inner: StructuredOperator = None
    offset: int = 0
    stride: int = 1

    kind = "InterleavedEmbedding"

    def __post_init__(self):
        if self.offset < 0 or self.stride < 1:
            raise ShapeMismatch("embedding needs offset >= 0 and stride >= 1")

    @property
    def bandwidth(self):
        b = self.inner.bandwidth
        if self.inner.dim is not None:
            b = min(b, self.inner.dim - 1)
        return self.stride * b

    def children(self):
        return (self.inner,)

    def _render(self, n, strict):
        out = np.zeros((n, n), dtype=complex)
        idx = np.arange(self.offset, n, self.stride)
        if self.inner.dim is not None:
            idx = idx[: self.inner.dim]
        if len(idx):
            out[np.ix_(idx, idx)] = render(self.inner, len(idx), strict)
        return out


KINDS = {cls.kind: cls for cls in (ScaledIdentity, DiagonalWithLimit, WeightedShift, FiniteMatrix, DirectSum,
                                   Block2x2, Adjoint, Compose, Sum, Scale, InterleavedEmbedding)}


# -- constructors -----------------------------------------------------------------


def _same_space(a: StructuredOperator, b: StructuredOperator, what: str):
    if a.dim != b.dim:
        raise ShapeMismatch(f"{what}: operands act on spaces of dimension {a.dim} and {b.dim}")


def adjoint(op: StructuredOperator) -> StructuredOperator:
    if isinstance(op, Adjoint):
        return op.inner
    return Adjoint(op)


def compose(left: StructuredOperator, right: StructuredOperator) -> Compose:
    _same_space(left, right, "compose")
    return Compose(left, right)


def add(left: StructuredOperator, right: StructuredOperator) -> Sum:
    _same_space(left, right, "sum")
    return Sum(left, right)


def scale(scalar: complex, op: StructuredOperator) -> Scale:
    return Scale(scalar, op)


def direct_sum(*parts: StructuredOperator, profile: SpectralProfile | None = None) -> DirectSum:
    if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
        parts = tuple(parts[0])
    return DirectSum(tuple(parts), declared_profile=profile)
