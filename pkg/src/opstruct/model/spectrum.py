"""Declared subsets of the complex plane built from zero-centred primitives.

Only what the lab's operator families need: isolated points, circles
``|z| = r``, closed disks ``|z| <= r`` and closed annuli ``r1 <= |z| <= r2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ParseError

INF = math.inf
_KINDS = ("circle", "disk", "annulus")


@dataclass(frozen=True, order=True)
class Region:
    kind: str
    radius: float
    inner: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParseError(f"unknown region kind {self.kind!r}", "region.kind")
        if not self.radius >= 0 or not self.inner >= 0:
            raise ParseError("region radii must be non-negative", "region")
        if self.kind == "annulus" and not self.inner <= self.radius:
            raise ParseError("annulus needs inner <= radius", "region")
        if self.kind != "annulus" and self.inner != 0.0:
            raise ParseError(f"{self.kind} takes no inner radius", "region")

    @classmethod
    def circle(cls, r: float) -> "Region":
        return cls("circle", float(r))

    @classmethod
    def disk(cls, r: float) -> "Region":
        return cls("disk", float(r))

    @classmethod
    def annulus(cls, r1: float, r2: float) -> "Region":
        return cls("annulus", float(r2), float(r1))

    @property
    def area_over_pi(self) -> float:
        # kept separate from `area` so Putnam bounds stay exact in binary floating point
        if self.kind == "disk":
            return self.radius ** 2
        if self.kind == "annulus":
            return self.radius ** 2 - self.inner ** 2
        return 0.0

    @property
    def area(self) -> float:
        return math.pi * self.area_over_pi

    def contains_point(self, z: complex, tol: float = 0.0) -> bool:
        r = abs(z)
        if self.kind == "circle":
            return abs(r - self.radius) <= tol
        if self.kind == "disk":
            return r <= self.radius + tol
        return self.inner - tol <= r <= self.radius + tol

    def contains_region(self, other: "Region", tol: float = 0.0) -> bool:
        if other.kind == "circle":
            return self.contains_point(other.radius, tol)
        lo = 0.0 if other.kind == "disk" else other.inner
        if self.kind == "circle":
            return other.radius - lo <= tol and abs(other.radius - self.radius) <= tol
        if self.kind == "disk":
            return other.radius <= self.radius + tol
        return self.inner - tol <= lo and other.radius <= self.radius + tol

    def to_json(self) -> dict:
        out = {"kind": self.kind, "radius": self.radius}
        if self.kind == "annulus":
            out["inner"] = self.inner
        return out

    @classmethod
    def from_json(cls, data, locus: str = "region") -> "Region":
        if not isinstance(data, dict) or "kind" not in data or "radius" not in data:
            raise ParseError("region needs 'kind' and 'radius'", locus)
        return cls(data["kind"], float(data["radius"]), float(data.get("inner", 0.0)))


def _mult_to_json(m):
    return "inf" if m == INF else m


def _mult_from_json(m, locus):
    if m == "inf":
        return INF
    if isinstance(m, int) and not isinstance(m, bool) and m >= 1:
        return m
    raise ParseError(f"multiplicity must be a positive integer or 'inf', got {m!r}", locus)


@dataclass(frozen=True)
class SpectrumDescription:
    """A finite list of points (with multiplicities) plus region primitives."""

    points: tuple[tuple[complex, int | float], ...] = ()
    regions: tuple[Region, ...] = ()

    def __post_init__(self):
        pts = tuple((complex(z), m) for z, m in self.points)
        for _, m in pts:
            if not (m == INF or (int(m) == m and m >= 1)):
                raise ParseError("point multiplicities must be >= 1", "spectrum.points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "regions", tuple(self.regions))

    @property
    def area(self) -> float:
        return sum(r.area for r in self.regions)

    @property
    def area_over_pi(self) -> float:
        return sum(r.area_over_pi for r in self.regions)

    @property
    def is_empty(self) -> bool:
        return not self.points and not self.regions

    def union(self, other: "SpectrumDescription") -> "SpectrumDescription":
        return SpectrumDescription(self.points + other.points, self.regions + other.regions).normalized()

    def normalized(self, tol: float = 1e-12) -> "SpectrumDescription":
        """Drop primitives covered by others, merge duplicate points, sort."""
        regions = sorted(set(self.regions), key=lambda r: (-r.area_over_pi, r.kind, r.radius, r.inner))
        kept: list[Region] = []
        for r in regions:
            if not any(k.contains_region(r, tol) for k in kept):
                kept.append(r)
        merged: dict[complex, int | float] = {}
        for z, m in self.points:
            if any(r.contains_point(z, tol) for r in kept):
                continue
            key = next((w for w in merged if abs(w - z) <= tol), z)
            merged[key] = merged.get(key, 0) + m
        pts = tuple(sorted(merged.items(), key=lambda p: (p[0].real, p[0].imag)))
        return SpectrumDescription(pts, tuple(sorted(kept)))

    def same_set(self, other: "SpectrumDescription", tol: float = 1e-12) -> bool:
        """Set equality (multiplicities ignored)."""
        a, b = self.normalized(tol), other.normalized(tol)
        if a.regions != b.regions or len(a.points) != len(b.points):
            return False
        return all(abs(p[0] - q[0]) <= tol for p, q in zip(a.points, b.points))

    def to_json(self) -> dict:
        return {
            "points": [[z.real, z.imag, _mult_to_json(m)] for z, m in self.points],
            "regions": [r.to_json() for r in self.regions],
        }

    @classmethod
    def from_json(cls, data, locus: str = "spectrum") -> "SpectrumDescription":
        if not isinstance(data, dict):
            raise ParseError("spectrum description must be an object", locus)
        pts = []
        for i, p in enumerate(data.get("points", [])):
            if not isinstance(p, list) or len(p) != 3:
                raise ParseError("points are [re, im, multiplicity]", f"{locus}.points[{i}]")
            pts.append((complex(p[0], p[1]), _mult_from_json(p[2], f"{locus}.points[{i}]")))
        regions = tuple(Region.from_json(r, f"{locus}.regions[{i}]")
                        for i, r in enumerate(data.get("regions", [])))
        return cls(tuple(pts), regions)


@dataclass(frozen=True)
class IsolatedPoint:
    """A point of sigma(T) outside the essential spectrum.

    ``index`` is the Fredholm index of ``T - value*I`` and ``multiplicity`` the
    dimension of the eigenspace (``inf`` allowed).
    """

    value: complex
    multiplicity: int | float = 1
    index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    def to_json(self) -> list:
        return [self.value.real, self.value.imag, _mult_to_json(self.multiplicity), self.index]

    @classmethod
    def from_json(cls, data, locus: str) -> "IsolatedPoint":
        if not isinstance(data, list) or len(data) != 4:
            raise ParseError("isolated points are [re, im, multiplicity, index]", locus)
        return cls(complex(data[0], data[1]), _mult_from_json(data[2], locus), int(data[3]))


EMPTY = SpectrumDescription()
