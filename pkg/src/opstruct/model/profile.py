"""Declared spectral data attached to a structured operator.

The scalar fields describe the modulus ``|T|``: its essential points, the
discrete points above and below, the eigenspace at the essential point, kernel
and cokernel dimensions and the minimum modulus. Optional fields describe
``T`` itself (essential spectrum, isolated points with their Fredholm index,
the region where the index is non-zero) and are only needed for the Weyl and
Fredholm computations.

Truncations never overwrite anything stored here; they only corroborate it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..errors import ParseError
from .rules import SequenceRule
from .spectrum import EMPTY, INF, IsolatedPoint, SpectrumDescription, _mult_from_json, _mult_to_json

# how many terms of a countable tail are inspected when validating monotonicity
TAIL_HORIZON = 64

CLASS_NAMES = frozenset({"normal", "selfadjoint", "positive", "quasinormal", "hyponormal"})


@dataclass(frozen=True)
class PointSet:
    """Finitely many points with multiplicities, optionally followed by a
    countable tail ``tail(k), k = 1, 2, ...`` of simple points."""

    points: tuple[tuple[float, int | float], ...] = ()
    tail: SequenceRule | None = None

    def __post_init__(self):
        pts = tuple(sorted(((float(v), m) for v, m in self.points), key=lambda p: p[0]))
        for v, m in pts:
            if not (m == INF or (int(m) == m and m >= 1)):
                raise ParseError(f"multiplicity of {v} must be >= 1", "profile.points")
        object.__setattr__(self, "points", pts)

    @property
    def is_finite(self) -> bool:
        return self.tail is None

    @property
    def is_empty(self) -> bool:
        return not self.points and self.tail is None

    def tail_values(self, count: int) -> list[float]:
        if self.tail is None:
            return []
        return [float(self.tail(k).real) for k in range(1, count + 1)]

    def values(self, horizon: int = TAIL_HORIZON) -> list[float]:
        """Finite points followed by the first ``horizon`` tail terms."""
        return [v for v, _ in self.points] + self.tail_values(horizon)

    def multiplicity(self, value: float, tol: float, horizon: int = 4096) -> int | float:
        total = sum(m for v, m in self.points if abs(v - value) <= tol)
        total += sum(1 for t in self.tail_values(horizon) if abs(t - value) <= tol)
        return total

    def to_json(self) -> dict:
        out: dict = {"points": [[v, _mult_to_json(m)] for v, m in self.points]}
        if self.tail is not None:
            out["tail"] = self.tail.to_json()
        return out

    @classmethod
    def from_json(cls, data, locus: str) -> "PointSet":
        if data is None:
            return cls()
        if not isinstance(data, dict):
            raise ParseError("point set must be an object", locus)
        pts = []
        for i, p in enumerate(data.get("points", [])):
            if not isinstance(p, list) or len(p) != 2:
                raise ParseError("points are [value, multiplicity]", f"{locus}.points[{i}]")
            pts.append((float(p[0]), _mult_from_json(p[1], f"{locus}.points[{i}]")))
        tail = data.get("tail")
        return cls(tuple(pts), None if tail is None else SequenceRule.from_json(tail, f"{locus}.tail"))


def _dim_to_json(d):
    return "inf" if d == INF else d


def _dim_from_json(d, locus):
    if d == "inf":
        return INF
    if isinstance(d, int) and not isinstance(d, bool) and d >= 0:
        return d
    raise ParseError(f"dimension must be a non-negative integer or 'inf', got {d!r}", locus)


@dataclass(frozen=True)
class SpectralProfile:
    essential_points: tuple[float, ...] = ()
    upper: PointSet = field(default_factory=PointSet)
    lower: PointSet = field(default_factory=PointSet)
    alpha_in_point_spectrum: bool = False
    alpha_eigenspace_dim: int | float = 0
    kernel_dim: int | float = 0
    cokernel_dim: int | float = 0
    min_modulus: float | None = None
    finite_dimensional: bool = False
    classes: frozenset[str] = frozenset()
    essential_spectrum: SpectrumDescription | None = None
    nonzero_index_set: SpectrumDescription = EMPTY
    isolated_points: tuple[IsolatedPoint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "essential_points", tuple(sorted(float(a) for a in self.essential_points)))
        object.__setattr__(self, "classes", frozenset(self.classes))
        object.__setattr__(self, "isolated_points", tuple(self.isolated_points))
        unknown = self.classes - CLASS_NAMES
        if unknown:
            raise ParseError(f"unknown class names {sorted(unknown)}", "profile.classes")
        if any(a < 0 for a in self.essential_points):
            raise ParseError("essential points of |T| are non-negative", "profile.essential_points")
        if self.alpha_in_point_spectrum != (self.alpha_eigenspace_dim != 0):
            raise ParseError("alpha_in_point_spectrum must agree with alpha_eigenspace_dim",
                             "profile.alpha_eigenspace_dim")

    # -- derived data -----------------------------------------------------------------

    @property
    def alpha(self) -> float:
        """The single essential point of |T|."""
        if len(self.essential_points) != 1:
            raise ValueError(f"profile has {len(self.essential_points)} essential points, not one")
        return self.essential_points[0]

    @property
    def has_single_essential_point(self) -> bool:
        return len(self.essential_points) == 1

    def declared_min_modulus(self) -> float:
        """Smallest declared spectral value of |T|."""
        candidates = list(self.essential_points) + self.lower.values() + self.upper.values()
        if self.kernel_dim:
            candidates.append(0.0)
        return min(candidates) if candidates else 0.0

    def declared_norm(self) -> float:
        candidates = list(self.essential_points) + self.lower.values() + self.upper.values()
        return max(candidates) if candidates else 0.0

    def validate(self) -> list[str]:
        """Return a list of invariant violations (empty when consistent)."""
        problems = []
        if self.has_single_essential_point:
            a = self.alpha
            if any(v <= a for v in self.upper.values()):
                problems.append("upper points must exceed the essential point")
            if any(v >= a for v in self.lower.values()):
                problems.append("lower points must be below the essential point")
            up = self.upper.tail_values(TAIL_HORIZON)
            if any(x <= y for x, y in zip(up, up[1:])):
                problems.append("upper tail must decrease strictly toward the essential point")
            lo = self.lower.tail_values(TAIL_HORIZON)
            if any(x >= y for x, y in zip(lo, lo[1:])):
                problems.append("lower tail must increase strictly toward the essential point")
        if self.min_modulus is not None and not math.isclose(
                self.min_modulus, self.declared_min_modulus(), rel_tol=1e-12, abs_tol=1e-15):
            problems.append(f"min_modulus {self.min_modulus} differs from smallest declared "
                            f"spectral value {self.declared_min_modulus()}")
        return problems

    def with_classes(self, *names: str) -> "SpectralProfile":
        return replace(self, classes=self.classes | frozenset(names))

    # -- JSON ------------------------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "essential_points": list(self.essential_points),
            "upper": self.upper.to_json(),
            "lower": self.lower.to_json(),
            "alpha_in_point_spectrum": self.alpha_in_point_spectrum,
            "alpha_eigenspace_dim": _dim_to_json(self.alpha_eigenspace_dim),
            "kernel_dim": _dim_to_json(self.kernel_dim),
            "cokernel_dim": _dim_to_json(self.cokernel_dim),
            "min_modulus": self.min_modulus,
            "finite_dimensional": self.finite_dimensional,
            "classes": sorted(self.classes),
        }
        if self.essential_spectrum is not None:
            out["essential_spectrum"] = self.essential_spectrum.to_json()
        if not self.nonzero_index_set.is_empty:
            out["nonzero_index_set"] = self.nonzero_index_set.to_json()
        if self.isolated_points:
            out["isolated_points"] = [p.to_json() for p in self.isolated_points]
        return out

    @classmethod
    def from_json(cls, data, locus: str = "profile") -> "SpectralProfile":
        if not isinstance(data, dict):
            raise ParseError("profile must be an object", locus)
        known = {"essential_points", "upper", "lower", "alpha_in_point_spectrum", "alpha_eigenspace_dim",
                 "kernel_dim", "cokernel_dim", "min_modulus", "finite_dimensional", "classes",
                 "essential_spectrum", "nonzero_index_set", "isolated_points"}
        unknown = set(data) - known
        if unknown:
            raise ParseError(f"unknown profile fields {sorted(unknown)}", locus)
        ess = data.get("essential_spectrum")
        return cls(
            essential_points=tuple(float(a) for a in data.get("essential_points", ())),
            upper=PointSet.from_json(data.get("upper"), f"{locus}.upper"),
            lower=PointSet.from_json(data.get("lower"), f"{locus}.lower"),
            alpha_in_point_spectrum=bool(data.get("alpha_in_point_spectrum", False)),
            alpha_eigenspace_dim=_dim_from_json(data.get("alpha_eigenspace_dim", 0), f"{locus}.alpha_eigenspace_dim"),
            kernel_dim=_dim_from_json(data.get("kernel_dim", 0), f"{locus}.kernel_dim"),
            cokernel_dim=_dim_from_json(data.get("cokernel_dim", 0), f"{locus}.cokernel_dim"),
            min_modulus=None if data.get("min_modulus") is None else float(data["min_modulus"]),
            finite_dimensional=bool(data.get("finite_dimensional", False)),
            classes=frozenset(data.get("classes", ())),
            essential_spectrum=None if ess is None else SpectrumDescription.from_json(ess, f"{locus}.essential_spectrum"),
            nonzero_index_set=SpectrumDescription.from_json(data.get("nonzero_index_set", {}), f"{locus}.nonzero_index_set"),
            isolated_points=tuple(IsolatedPoint.from_json(p, f"{locus}.isolated_points[{i}]")
                                  for i, p in enumerate(data.get("isolated_points", []))),
        )
