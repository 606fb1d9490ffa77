"""Class predicates, essential-spectrum estimation and membership tests.

Matrix predicates (``is_normal`` and friends) act on a dense array. Operator
predicates come in two flavours: ``symbolic`` reads the AST and the declared
profile, ``interior`` measures the exact compression of the relevant word in
T, T* onto span{e_1..e_m}, with m kept away from the truncation boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import Inconsistent, InteriorEmpty, SpectrumUndeclared
from .kernels import hermitian_eig, operator_norm, psd_check, singular_values
from .model.operators import (
    Adjoint, Block2x2, DiagonalWithLimit, DirectSum, FiniteMatrix, InterleavedEmbedding, Scale, ScaledIdentity,
    StructuredOperator, WeightedShift, column_section, render,
)
from .model.profile import SpectralProfile
from .model.spectrum import EMPTY, INF, SpectrumDescription


class Check(NamedTuple):
    holds: bool
    defect: float


def _check(holds, defect) -> Check:
    return Check(bool(holds), float(defect))


def _norm(a: np.ndarray) -> float:
    return operator_norm(a) if a.size else 0.0


# -- dense predicates -------------------------------------------------------------


def is_normal(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    a = np.asarray(a, dtype=complex)
    defect = _norm(a @ a.conj().T - a.conj().T @ a)
    return _check(defect <= tol.eq_tol * _norm(a) ** 2, defect)


def is_selfadjoint(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    a = np.asarray(a, dtype=complex)
    defect = _norm(a - a.conj().T)
    return _check(defect <= tol.eq_tol * _norm(a), defect)


def is_positive(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    """Defect is minus the smallest eigenvalue of the Hermitian part."""
    a = np.asarray(a, dtype=complex)
    if not is_selfadjoint(a, tol).holds:
        return _check(False, math.inf)
    h = (a + a.conj().T) / 2
    res = psd_check(h, tol)
    return _check(res.holds, -res.min_eigenvalue)


def is_quasinormal(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    a = np.asarray(a, dtype=complex)
    g = a.conj().T @ a
    defect = _norm(a @ g - g @ a)
    return _check(defect <= tol.eq_tol * _norm(a) ** 3, defect)


def is_hyponormal_full(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    """PSD test of T*T - TT* on the whole matrix; defect is its smallest eigenvalue.

    The threshold scales with ||T||^2 (as in the interior test), so a normal
    matrix whose self-commutator is pure rounding noise is accepted.
    """
    a = np.asarray(a, dtype=complex)
    d = a.conj().T @ a - a @ a.conj().T
    res = psd_check((d + d.conj().T) / 2, tol)
    holds = res.min_eigenvalue >= -tol.psd_tol * max(_norm(a) ** 2, np.finfo(float).tiny)
    return _check(holds, res.min_eigenvalue)


def _worst_ratio(num_sq: np.ndarray, den: np.ndarray) -> float:
    worst = 0.0
    for p, q in zip(num_sq, den):
        if p <= 0:
            continue
        worst = max(worst, math.inf if q <= 0 else p / q)
    return worst


def _sample_vectors(n: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, samples)) + 1j * rng.standard_normal((n, samples))
    x /= np.linalg.norm(x, axis=0)
    return np.hstack([np.eye(n, dtype=complex), x])


def is_paranormal_sampled(a: np.ndarray, samples: int = 64, seed: int = 0,
                          tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    """Refutation test of ||Tx||^2 <= ||T^2 x|| ||x|| on unit vectors; defect is the worst ratio."""
    a = np.asarray(a, dtype=complex)
    x = _sample_vectors(a.shape[0], samples, seed)
    return _paranormal_from(a @ x, a @ (a @ x), tol)


def is_star_paranormal_sampled(a: np.ndarray, samples: int = 64, seed: int = 0,
                               tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    """Refutation test of ||T*x||^2 <= ||T^2 x|| ||x||."""
    a = np.asarray(a, dtype=complex)
    x = _sample_vectors(a.shape[0], samples, seed)
    return _paranormal_from(a.conj().T @ x, a @ (a @ x), tol)


def _paranormal_from(tx: np.ndarray, t2x: np.ndarray, tol: ToleranceConfig) -> Check:
    worst = _worst_ratio(np.linalg.norm(tx, axis=0) ** 2, np.linalg.norm(t2x, axis=0))
    return _check(worst <= 1 + tol.eq_tol, worst)


# -- exact interior compressions of an operator -----------------------------------------


def interior_dim(op: StructuredOperator, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    if op.dim is not None and op.dim <= n:
        return op.dim
    m = n - tol.interior_margin_factor * op.bandwidth
    if m < 1:
        raise InteriorEmpty(f"n = {n} leaves no interior for bandwidth {op.bandwidth} "
                            f"and margin factor {tol.interior_margin_factor}")
    return m


def self_commutator(op: StructuredOperator, m: int) -> np.ndarray:
    """Exact P_m (T*T - TT*) P_m."""
    c = column_section(op, m)
    r = render(op, m + op.bandwidth)[:m, :]
    return c.conj().T @ c - r @ r.conj().T


def quasinormal_commutator(op: StructuredOperator, m: int) -> np.ndarray:
    """Exact P_m (T T*T - T*T T) P_m."""
    b = op.bandwidth
    t = render(op, m + 2 * b)
    g = t.conj().T @ t  # exact on the leading m + b coordinates
    return (t[:m, : m + b] @ g[: m + b, :m]) - (g[:m, : m + b] @ t[: m + b, :m])


def is_hyponormal_interior(op: StructuredOperator, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    """Render at n, form D = T*T - TT*, keep the leading n - margin coordinates, PSD-test."""
    m = interior_dim(op, n, tol)
    t = render(op, n)
    d = (t.conj().T @ t - t @ t.conj().T)[:m, :m]
    res = psd_check((d + d.conj().T) / 2, tol)
    norm = _norm(t)
    holds = res.min_eigenvalue >= -tol.psd_tol * max(norm ** 2, np.finfo(float).tiny)
    return _check(holds, res.min_eigenvalue)


def is_normal_interior(op: StructuredOperator, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    m = interior_dim(op, n, tol)
    defect = _norm(self_commutator(op, m))
    return _check(defect <= tol.eq_tol * _norm(render(op, n)) ** 2, defect)


def is_quasinormal_interior(op: StructuredOperator, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    m = interior_dim(op, n, tol)
    defect = _norm(quasinormal_commutator(op, m))
    return _check(defect <= tol.eq_tol * _norm(render(op, n)) ** 3, defect)


def is_selfadjoint_interior(op: StructuredOperator, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    return is_selfadjoint(render(op, n), tol)


def is_positive_interior(op: StructuredOperator, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    return is_positive(render(op, n), tol)


def _interior_paranormal(op, n, samples, seed, tol, star):
    m = interior_dim(op, n, tol)
    b = op.bandwidth
    t = render(op, m + 2 * b)
    x = _sample_vectors(m, samples, seed)
    tx = t[:, :m] @ x
    t2x = t @ tx
    first = t[:m, :].conj().T @ x if star else tx
    return _paranormal_from(first, t2x, tol)


def is_paranormal_interior(op, n, samples=64, seed=0, tol=DEFAULT_TOL) -> Check:
    return _interior_paranormal(op, n, samples, seed, tol, star=False)


def is_star_paranormal_interior(op, n, samples=64, seed=0, tol=DEFAULT_TOL) -> Check:
    return _interior_paranormal(op, n, samples, seed, tol, star=True)


# -- symbolic predicates ----------------------------------------------------------------

_IMPLIED = {
    "positive": {"positive", "selfadjoint", "normal", "quasinormal", "hyponormal"},
    "selfadjoint": {"selfadjoint", "normal", "quasinormal", "hyponormal"},
    "normal": {"normal", "quasinormal", "hyponormal"},
    "quasinormal": {"quasinormal", "hyponormal"},
    "hyponormal": {"hyponormal"},
}
SYMBOLIC_HORIZON = 4096


def _declared(op: StructuredOperator, name: str) -> bool:
    p = op.declared_profile
    return p is not None and any(name in _IMPLIED[c] for c in p.classes)


def _all_of(results):
    results = list(results)
    if any(r is False for r in results):
        return False
    if all(r is True for r in results):
        return True
    return None


def _structural(op: StructuredOperator, name: str, tol: ToleranceConfig):
    if isinstance(op, ScaledIdentity):
        z = complex(op.scalar)
        if name == "selfadjoint":
            return z.imag == 0
        if name == "positive":
            return z.imag == 0 and z.real >= 0
        return True
    if isinstance(op, DiagonalWithLimit):
        vals = op.entries.evaluate(SYMBOLIC_HORIZON)
        if name in ("selfadjoint", "positive"):
            if np.any(vals.imag != 0) or (name == "positive" and np.any(vals.real < 0)):
                return False
            return True if op.entries.is_constant else None
        return True
    if isinstance(op, WeightedShift):
        w = np.abs(op.weights.evaluate(SYMBOLIC_HORIZON + 1))
        if name in ("normal", "selfadjoint", "positive"):
            if np.any(w != 0):
                return False
            return True if op.weights.is_constant else None
        if name == "quasinormal":
            ok = np.all(w[:-1] * (w[1:] ** 2 - w[:-1] ** 2) == 0)
        else:
            ok = np.all(np.diff(w) >= 0)
        if not ok:
            return False
        return True if op.weights.is_constant else None
    if isinstance(op, FiniteMatrix):
        a = op.array
        check = {"normal": is_normal, "selfadjoint": is_selfadjoint, "positive": is_positive,
                 "quasinormal": is_quasinormal, "hyponormal": is_hyponormal_full}[name]
        return check(a, tol).holds
    if isinstance(op, DirectSum):
        return _all_of(symbolic_class(p, name, tol) for p in op.parts)
    if isinstance(op, Block2x2):
        if op.blocks[1] is None and op.blocks[2] is None:
            return _all_of(symbolic_class(b, name, tol) for b in (op.blocks[0], op.blocks[3]) if b is not None)
        return None
    if isinstance(op, Adjoint):
        if name in ("normal", "selfadjoint", "positive"):
            return symbolic_class(op.inner, name, tol)
        return True if symbolic_class(op.inner, "normal", tol) else None
    if isinstance(op, Scale):
        z = complex(op.scalar)
        if name in ("selfadjoint", "positive"):
            if z == 0:
                return True
            if z.imag != 0 or (name == "positive" and z.real < 0):
                inner = symbolic_class(op.inner, "selfadjoint", tol)
                return None if inner is not True else (z.imag == 0 and z.real >= 0 if name == "positive" else False)
        return symbolic_class(op.inner, name, tol)
    if isinstance(op, InterleavedEmbedding):
        return symbolic_class(op.inner, name, tol)
    return None


def symbolic_class(op: StructuredOperator, name: str, tol: ToleranceConfig = DEFAULT_TOL) -> bool | None:
    """True/False when decidable from the AST or the declared classes, else None."""
    structural = _structural(op, name, tol)
    if structural is not None:
        return structural
    if _declared(op, name):
        return True
    return None


# -- essential spectrum estimation ---------------------------------------------------


@dataclass(frozen=True)
class EssentialCluster:
    center: float
    uncertainty: float
    confidence: float
    counts: tuple[int, ...]
    exact: bool


@dataclass(frozen=True)
class EssentialEstimate:
    clusters: tuple[EssentialCluster, ...]
    dims: tuple[int, ...]
    hermitian: bool

    @property
    def centers(self) -> tuple[float, ...]:
        return tuple(c.center for c in self.clusters)


def _spectral_values(op: StructuredOperator, n: int, hermitian: bool) -> np.ndarray:
    if hermitian:
        return hermitian_eig(render(op, n)).values
    return np.sort(singular_values(column_section(op, n)))


def _coarse_clusters(values: np.ndarray, tau: float) -> list[tuple[float, float]]:
    groups = []
    start = values[0]
    prev = values[0]
    for v in values[1:]:
        if v - prev > tau:
            groups.append((start, prev))
            start = v
        prev = v
    groups.append((start, prev))
    return groups


def _power_law_limit(ns, xs) -> tuple[float, float]:
    """Limit of x_n = l + c n^-p from three samples; returns (l, uncertainty)."""
    (n1, n2, n3), (x1, x2, x3) = ns, xs
    d1, d2 = x1 - x2, x2 - x3
    if d2 == 0:
        return x3, 0.0
    if d1 == 0 or d1 * d2 < 0:
        return x3, abs(d2)
    ratio = d1 / d2

    def g(p):
        return (n1 ** -p - n2 ** -p) / (n2 ** -p - n3 ** -p) - ratio

    lo, hi = 1e-3, 12.0
    if g(lo) * g(hi) > 0:
        return x3, abs(d2)
    for _ in range(200):
        mid = (lo + hi) / 2
        if g(lo) * g(mid) <= 0:
            hi = mid
        else:
            lo = mid
    p = (lo + hi) / 2
    c = d2 / (n2 ** -p - n3 ** -p)
    limit = x3 - c * n3 ** -p
    return limit, abs(x3 - limit)


def estimate_essential_spectrum(op: StructuredOperator, dims, tol: ToleranceConfig = DEFAULT_TOL,
                                check_declared: bool = True) -> EssentialEstimate:
    """Points where the eigenvalue count of the finite sections grows with n.

    Self-adjoint operators use eigenvalues of the sections, anything else the
    singular values of the column sections (the spectrum of |T|). A cluster of
    equal values with growing multiplicity gives an exact center; otherwise the
    moving edge of the cluster is extrapolated as l + c n^-p.
    """
    dims = tuple(sorted(int(n) for n in dims))
    if len(dims) < 3:
        raise ValueError("essential spectrum estimation needs at least three dimensions")
    hermitian = is_selfadjoint(render(op, dims[0]), tol).holds and is_selfadjoint(render(op, dims[-1]), tol).holds
    spectra = [_spectral_values(op, n, hermitian) for n in dims]
    last = spectra[-1]
    spread = float(last[-1] - last[0]) if last.size else 0.0
    tau = max(tol.cluster_gap, 0.05 * spread)
    clusters = []
    for lo, hi in _coarse_clusters(last, tau):
        window = [(v[(v >= lo - tau / 2) & (v <= hi + tau / 2)]) for v in spectra]
        counts = tuple(len(w) for w in window)
        steps = [b > a for a, b in zip(counts, counts[1:])]
        if not steps[-1] or counts[-1] <= counts[0]:
            continue
        confidence = sum(steps) / len(steps)
        exact = _exact_subcluster(window, tol.cluster_gap)
        if exact is not None:
            clusters.append(EssentialCluster(exact, 0.0, confidence, counts, True))
            continue
        lows = [float(w.min()) for w in window[-3:]]
        highs = [float(w.max()) for w in window[-3:]]
        moves_low = abs(lows[-1] - lows[-2]) > abs(highs[-1] - highs[-2])
        edge = lows if moves_low else highs
        limit, unc = _power_law_limit(dims[-3:], edge)
        clusters.append(EssentialCluster(limit, unc, confidence, counts, False))
    estimate = EssentialEstimate(tuple(sorted(clusters, key=lambda c: c.center)), dims, hermitian)
    if check_declared and op.declared_profile is not None:
        _cross_check(estimate, op.declared_profile, tol)
    return estimate


def _exact_subcluster(window, gap):
    """Center of a run of equal values whose multiplicity grows at every step."""
    best = None
    for v in np.unique(np.round(window[-1] / max(gap, 1e-300)) * gap):
        mults = [int(np.sum(np.abs(w - v) <= gap)) for w in window]
        if all(b > a for a, b in zip(mults, mults[1:])):
            members = window[-1][np.abs(window[-1] - v) <= gap]
            if best is None or len(members) > best[1]:
                best = (float(np.mean(members)), len(members))
    return None if best is None else best[0]


def _cross_check(estimate: EssentialEstimate, profile: SpectralProfile, tol: ToleranceConfig):
    declared = profile.essential_points
    found = [(abs(c.center) if estimate.hermitian else c.center, c.uncertainty) for c in estimate.clusters]
    if profile.finite_dimensional:
        return
    for center, unc in found:
        if not any(abs(center - d) <= max(tol.cluster_gap, unc) for d in declared):
            raise Inconsistent(f"estimated essential point {center:.6g} (+/- {unc:.1e}) is not among the "
                               f"declared points {list(declared)}")
    for d in declared:
        if not any(abs(center - d) <= max(tol.cluster_gap, unc) for center, unc in found):
            raise Inconsistent(f"declared essential point {d} not corroborated by the truncations")


# -- membership and Fredholm data --------------------------------------------------------


def an_membership(profile: SpectralProfile) -> bool:
    return profile.has_single_essential_point and profile.lower.is_finite


def am_membership(profile: SpectralProfile) -> bool:
    return profile.has_single_essential_point and profile.upper.is_finite


def closure_an_membership(profile: SpectralProfile) -> bool:
    """Finite-dimensional operators count as members (every operator on C^n is AN)."""
    return profile.finite_dimensional or profile.has_single_essential_point


def imaginary_shift_profile(profile: SpectralProfile, shift: float) -> SpectralProfile:
    """Profile of |S + i*shift*I| for self-adjoint S with the given profile.

    |S + i t| = sqrt(S^2 + t^2), so every spectral value s of |S| moves to
    sqrt(s^2 + t^2); a singleton essential set stays a singleton.
    """
    from dataclasses import replace
    from .model.profile import PointSet
    from .model.rules import SequenceRule

    def move(x):
        return math.hypot(x, shift)

    def move_set(ps):
        tail = None
        if ps.tail is not None:
            tail = SequenceRule(f"sqrt(({ps.tail.expr})**2 + {shift!r}**2)" if ps.tail.expr else None,
                                tuple(move(abs(v)) for v in ps.tail.values))
        return PointSet(tuple((move(v), m) for v, m in ps.points), tail)

    t0 = shift != 0
    return replace(profile, essential_points=tuple(move(a) for a in profile.essential_points),
                   upper=move_set(profile.upper), lower=move_set(profile.lower),
                   kernel_dim=0 if t0 else profile.kernel_dim, cokernel_dim=0 if t0 else profile.cokernel_dim,
                   min_modulus=None, classes=frozenset({"normal"} if t0 else profile.classes),
                   essential_spectrum=None, nonzero_index_set=EMPTY, isolated_points=())


@dataclass(frozen=True)
class FredholmData:
    kernel_dim: int | float
    cokernel_dim: int | float
    index: int | None
    is_fredholm: bool
    essential_min_modulus: float | None = None

    def to_json(self) -> dict:
        enc = (lambda d: "inf" if d == INF else d)
        return {"kernel_dim": enc(self.kernel_dim), "cokernel_dim": enc(self.cokernel_dim), "index": self.index,
                "is_fredholm": self.is_fredholm, "essential_min_modulus": self.essential_min_modulus}


def fredholm_data(profile: SpectralProfile, alpha: float | None = None) -> FredholmData:
    """Fredholm iff kernel and cokernel are finite and m_e(T) > 0 (or the space is finite-dimensional)."""
    if alpha is None and profile.essential_points:
        alpha = min(profile.essential_points)
    k, c = profile.kernel_dim, profile.cokernel_dim
    finite = k != INF and c != INF
    fred = finite and (profile.finite_dimensional or (alpha is not None and alpha > 0))
    return FredholmData(k, c, int(k - c) if fred else None, fred, alpha)


def weyl_spectrum_symbolic(profile: SpectralProfile) -> SpectrumDescription:
    """omega(T) = sigma_ess(T) plus the non-zero-index set plus exceptional isolated points."""
    if profile.finite_dimensional:
        return EMPTY
    if profile.essential_spectrum is None:
        raise SpectrumUndeclared("the Weyl spectrum needs a declared essential spectrum")
    extra = tuple((p.value, p.multiplicity) for p in profile.isolated_points
                  if p.index != 0 or p.multiplicity == INF)
    return profile.essential_spectrum.union(profile.nonzero_index_set).union(SpectrumDescription(extra))


# -- reports -----------------------------------------------------------------------


@dataclass(frozen=True)
class FlagResult:
    holds: bool | None
    defect: float | None
    mode: str
    dim: int | None

    def __post_init__(self):
        if self.holds is not None:
            object.__setattr__(self, "holds", bool(self.holds))
        if self.defect is not None:
            object.__setattr__(self, "defect", float(self.defect))

    def to_json(self) -> dict:
        d = self.defect
        if d is not None and not math.isfinite(d):
            d = "inf" if d > 0 else "-inf"
        return {"holds": self.holds, "defect": d, "mode": self.mode, "dim": self.dim}


@dataclass(frozen=True)
class ClassificationReport:
    flags: dict[str, FlagResult]
    profile_used: SpectralProfile | None
    dims_tested: tuple[int, ...]
    essential_estimate: tuple[float, ...] | None = None
    fredholm: FredholmData | None = None
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "flags": {k: v.to_json() for k, v in sorted(self.flags.items())},
            "profile_used": None if self.profile_used is None else self.profile_used.to_json(),
            "dims_tested": list(self.dims_tested),
            "essential_estimate": None if self.essential_estimate is None else list(self.essential_estimate),
            "fredholm": None if self.fredholm is None else self.fredholm.to_json(),
            "notes": list(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


CLASS_FLAGS = ("normal", "selfadjoint", "positive", "quasinormal", "hyponormal")
_INTERIOR = {"normal": is_normal_interior, "selfadjoint": is_selfadjoint_interior, "positive": is_positive_interior,
             "quasinormal": is_quasinormal_interior, "hyponormal": is_hyponormal_interior}


def classify(op: StructuredOperator, dims, tol: ToleranceConfig = DEFAULT_TOL, mode: str = "both",
             samples: int = 64, seed: int = 0) -> ClassificationReport:
    """Run every predicate; numeric flags are measured at the largest dimension."""
    if mode not in ("symbolic", "numeric", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    dims = tuple(sorted(int(n) for n in dims))
    n = dims[-1] if dims else None
    flags: dict[str, FlagResult] = {}
    notes = []
    for name in CLASS_FLAGS:
        if mode in ("symbolic", "both"):
            flags[name if mode == "symbolic" else f"{name}.symbolic"] = FlagResult(
                symbolic_class(op, name, tol), None, "symbolic", None)
        if mode in ("numeric", "both") and n is not None:
            res = _INTERIOR[name](op, n, tol)
            m = "full" if op.dim is not None and op.dim <= n else "interior"
            flags[name if mode == "numeric" else f"{name}.numeric"] = FlagResult(res.holds, res.defect, m, n)
    if mode in ("numeric", "both") and n is not None:
        for name, fn in (("paranormal", is_paranormal_interior), ("star_paranormal", is_star_paranormal_interior)):
            res = fn(op, n, samples, seed, tol)
            flags[name] = FlagResult(res.holds, res.defect, "sampled", n)
    profile = op.declared_profile
    estimate = None
    if mode in ("numeric", "both") and len(dims) >= 3 and (op.dim is None):
        try:
            estimate = estimate_essential_spectrum(op, dims, tol, check_declared=profile is not None).centers
        except Inconsistent as exc:
            notes.append(f"inconsistent: {exc}")
            estimate = estimate_essential_spectrum(op, dims, tol, check_declared=False).centers
    fred = None
    if profile is not None:
        flags["an"] = FlagResult(an_membership(profile), None, "symbolic", None)
        flags["am"] = FlagResult(am_membership(profile), None, "symbolic", None)
        flags["closure_an"] = FlagResult(closure_an_membership(profile), None, "symbolic", None)
        fred = fredholm_data(profile)
    elif estimate is not None:
        flags["closure_an"] = FlagResult(len(estimate) == 1, None, "estimated", n)
    return ClassificationReport(flags, profile, dims, estimate, fred, tuple(notes))
