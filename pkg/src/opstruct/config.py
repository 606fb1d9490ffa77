from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds shared by every check.

    ``eq_tol``, ``psd_tol`` and ``rank_tol`` are relative: callers multiply them
    by the appropriate power of an operator norm. ``cluster_gap`` is absolute.
    """

    eq_tol: float = 1e-10
    psd_tol: float = 1e-10
    rank_tol: float = 1e-10
    cluster_gap: float = 1e-6
    interior_margin_factor: int = 2

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be strictly positive")
        if int(self.interior_margin_factor) != self.interior_margin_factor:
            raise ValueError("interior_margin_factor must be an integer")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOL = ToleranceConfig()
