"""Sufficient conditions for normality of hyponormal operators in the closure of AN.

Premises are established from declared profiles (or exact finite sections
where that is sound); conclusions are measured as the interior self-commutator
defect ||P_m (T*T - TT*) P_m|| across dimensions. A verdict never claims
normality when its premise fails.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .classification import (
    closure_an_membership, estimate_essential_spectrum, interior_dim, is_hyponormal_full, is_hyponormal_interior,
    is_normal, is_normal_interior, self_commutator, symbolic_class, weyl_spectrum_symbolic,
)
from .config import DEFAULT_TOL, ToleranceConfig
from .errors import PremiseFailed, SpectrumUndeclared
from .kernels import max_principal_angle, min_modulus, null_basis, operator_norm, singular_values
from .model.operators import StructuredOperator, adjoint, column_section, render, row_section
from .model.profile import SpectralProfile
from .model.spectrum import INF, SpectrumDescription

CRITERIA = ("Invertible", "EqualKernels", "WeylEqualsEssential", "CompactHyponormal")


@dataclass(frozen=True)
class NormalityVerdict:
    criterion: str
    premise_holds: bool
    commutator_defect: float
    conclusion_normal: bool
    dims: tuple[int, ...]
    defects: tuple[float, ...] = ()
    norm: float = 0.0
    premises: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.conclusion_normal and not self.premise_holds:
            raise ValueError("a normality conclusion needs its premise")

    @property
    def decaying(self) -> bool:
        d = self.defects
        return all(b <= a + 1e-15 for a, b in zip(d, d[1:]))

    def to_json(self) -> dict:
        return {"criterion": self.criterion, "premise_holds": self.premise_holds,
                "commutator_defect": self.commutator_defect, "conclusion_normal": self.conclusion_normal,
                "dims": list(self.dims), "defects": list(self.defects), "norm": self.norm,
                "decaying": self.decaying, "premises": dict(sorted(self.premises.items())),
                "notes": list(self.notes)}

    def require(self) -> "NormalityVerdict":
        """Raise PremiseFailed when the premise does not hold."""
        if not self.premise_holds:
            failed = sorted(k for k, v in self.premises.items() if v is False)
            raise PremiseFailed(f"{self.criterion}: premise fails ({', '.join(failed) or 'unknown'})")
        return self


def _profile(op, profile):
    if profile is None and isinstance(op, StructuredOperator):
        return op.declared_profile
    return profile


def _dims(op: StructuredOperator, dims) -> tuple[int, ...]:
    dims = tuple(sorted(int(n) for n in dims))
    if not dims:
        raise ValueError("at least one dimension is needed")
    if op.dim is not None:
        dims = tuple(sorted({min(n, op.dim) for n in dims}))
    return dims


def _defects(op: StructuredOperator, dims, tol) -> tuple[tuple[float, ...], float]:
    out = []
    for n in dims:
        m = interior_dim(op, n, tol)
        out.append(operator_norm(self_commutator(op, m)))
    return tuple(out), operator_norm(column_section(op, dims[-1]))


def _hyponormal(op: StructuredOperator, dims, tol) -> bool:
    sym = symbolic_class(op, "hyponormal", tol)
    if sym is not None:
        return sym
    return is_hyponormal_interior(op, dims[-1], tol).holds


def _closure_an(op: StructuredOperator, profile: SpectralProfile | None, dims, tol) -> bool:
    if profile is not None:
        return closure_an_membership(profile)
    if op.dim is not None:
        return True
    if len(dims) >= 3:
        return len(estimate_essential_spectrum(op, dims, tol, check_declared=False).clusters) == 1
    return False


def _bounded_below(op: StructuredOperator, profile, dims, tol) -> bool:
    if profile is not None and profile.min_modulus is not None:
        return profile.min_modulus > 0 and profile.kernel_dim == 0
    # column sections are exact, so their minimum modulus bounds m(T) on span{e_1..e_n} from above
    norm = operator_norm(column_section(op, dims[-1]))
    return all(min_modulus(column_section(op, n)) > tol.rank_tol * norm for n in dims)


def _surjective(op: StructuredOperator, profile, dims, tol) -> bool:
    if profile is not None and not profile.finite_dimensional:
        return profile.cokernel_dim == 0
    norm = operator_norm(column_section(op, dims[-1]))
    # the row section P_n T is exact; a unit vector in the first n coordinates
    # with small ||T* x|| witnesses a non-closed or non-dense range
    return all(singular_values(row_section(op, n))[-1] > tol.rank_tol * norm for n in dims)


def _verdict(criterion, premises, op, dims, tol, notes=(), bound: float = 0.0) -> NormalityVerdict:
    defects, norm = _defects(op, dims, tol)
    premise = all(v is True for v in premises.values())
    conclusion = premise and defects[-1] <= bound + tol.eq_tol * max(norm, np.finfo(float).tiny) ** 2
    return NormalityVerdict(criterion, premise, defects[-1], bool(conclusion), dims, defects, norm,
                            dict(premises), tuple(notes))


def _matrix_verdict(criterion, a: np.ndarray, premises, tol, notes=()) -> NormalityVerdict:
    chk = is_normal(a, tol)
    premise = all(v is True for v in premises.values())
    n = a.shape[0]
    return NormalityVerdict(criterion, premise, chk.defect, bool(premise and chk.holds), (n,), (chk.defect,),
                            operator_norm(a), dict(premises), tuple(notes))


def check_invertible_normal(op, profile: SpectralProfile | None = None, tol: ToleranceConfig = DEFAULT_TOL,
                            dims=(64, 128, 256)) -> NormalityVerdict:
    """An invertible hyponormal operator in the closure of AN is normal."""
    if not isinstance(op, StructuredOperator):
        a = np.asarray(op, dtype=complex)
        norm = operator_norm(a)
        premises = {"hyponormal": is_hyponormal_full(a, tol).holds,
                    "invertible": min_modulus(a) > tol.rank_tol * norm}
        return _matrix_verdict("Invertible", a, premises, tol, ("finite matrix",))
    profile = _profile(op, profile)
    dims = _dims(op, dims)
    premises = {
        "closure_an": _closure_an(op, profile, dims, tol),
        "hyponormal": _hyponormal(op, dims, tol),
        "bounded_below": _bounded_below(op, profile, dims, tol),
        "surjective": _surjective(op, profile, dims, tol),
    }
    return _verdict("Invertible", premises, op, dims, tol)


def _kernels_equal(op: StructuredOperator, profile, dims, tol) -> tuple[bool, str]:
    if profile is not None and not profile.finite_dimensional:
        if profile.kernel_dim != profile.cokernel_dim:
            return False, f"declared kernel dims differ ({profile.kernel_dim} vs {profile.cokernel_dim})"
        if profile.kernel_dim == INF:
            return False, "infinite dimensional kernel"
    n = dims[-1]
    c = np.array(column_section(op, n))
    cs = np.array(column_section(adjoint(op), n))
    k1, k2 = null_basis(c, tol), null_basis(cs, tol)
    if k1.shape[1] != k2.shape[1]:
        return False, f"kernel dims at n = {n}: {k1.shape[1]} vs {k2.shape[1]}"
    angle = max_principal_angle(k1, k2)
    if angle > tol.eq_tol:
        return False, f"largest principal angle between kernels {angle:.3e}"
    return True, f"kernel dim {k1.shape[1]}, largest principal angle {angle:.3e}"


def check_equal_kernels_normal(op, profile: SpectralProfile | None = None, tol: ToleranceConfig = DEFAULT_TOL,
                               dims=(64, 128, 256)) -> NormalityVerdict:
    """N(T) = N(T*) for hyponormal T in the closure of AN forces normality.

    The common kernel reduces T, so the measurement also reports the minimum
    modulus of T on the complement of the kernel.
    """
    if not isinstance(op, StructuredOperator):
        a = np.asarray(op, dtype=complex)
        k1, k2 = null_basis(a, tol), null_basis(a.conj().T, tol)
        same = k1.shape[1] == k2.shape[1] and max_principal_angle(k1, k2) <= tol.eq_tol
        premises = {"hyponormal": is_hyponormal_full(a, tol).holds, "kernels_equal": bool(same)}
        return _matrix_verdict("EqualKernels", a, premises, tol, ("finite matrix",))
    profile = _profile(op, profile)
    dims = _dims(op, dims)
    same, note = _kernels_equal(op, profile, dims, tol)
    premises = {
        "closure_an": _closure_an(op, profile, dims, tol),
        "hyponormal": _hyponormal(op, dims, tol),
        "kernels_equal": same,
    }
    notes = [note]
    if same:
        n = dims[-1]
        c = np.array(column_section(op, n))
        k = null_basis(c, tol)
        q = null_basis(k.conj().T, tol) if k.shape[1] else np.eye(n, dtype=complex)
        notes.append(f"minimum modulus on the kernel complement {min_modulus(c @ q):.6g}")
    return _verdict("EqualKernels", premises, op, dims, tol, notes)


def putnam_bound(spec: SpectrumDescription) -> float:
    """Area of the spectrum over pi; bounds ||T*T - TT*|| for hyponormal T."""
    return float(spec.area_over_pi)


def check_weyl_condition_normal(op, profile: SpectralProfile | None = None, tol: ToleranceConfig = DEFAULT_TOL,
                                dims=(64, 128, 256)) -> NormalityVerdict:
    """sigma_ess(T) = omega(T) for hyponormal T in the closure of AN forces normality.

    Under the premise sigma(T) is omega(T) plus isolated eigenvalues of finite
    multiplicity, a set of zero area, so the self-commutator bound is zero.
    """
    profile = _profile(op, profile)
    if profile is None or (profile.essential_spectrum is None and not profile.finite_dimensional):
        raise SpectrumUndeclared("the Weyl criterion needs a declared essential spectrum")
    dims = _dims(op, dims)
    weyl = weyl_spectrum_symbolic(profile)
    ess = profile.essential_spectrum if profile.essential_spectrum is not None else weyl
    same = ess.same_set(weyl)
    premises = {
        "closure_an": closure_an_membership(profile),
        "hyponormal": _hyponormal(op, dims, tol),
        "essential_equals_weyl": same,
    }
    bound = putnam_bound(weyl) if same else putnam_bound(ess.union(weyl))
    notes = (f"putnam bound {bound!r}",)
    # the bound only feeds the conclusion when the premise holds, and then it is zero
    return _verdict("WeylEqualsEssential", premises, op, dims, tol, notes, bound if same else 0.0)


def check_compact_hyponormal_normal(op, profile: SpectralProfile | None = None,
                                    tol: ToleranceConfig = DEFAULT_TOL, dims=(64, 128, 256)) -> NormalityVerdict:
    """A compact hyponormal operator is normal."""
    profile = _profile(op, profile)
    dims = _dims(op, dims)
    compact = profile is not None and (profile.finite_dimensional or tuple(profile.essential_points) == (0.0,))
    premises = {"compact": bool(compact), "hyponormal": _hyponormal(op, dims, tol)}
    return _verdict("CompactHyponormal", premises, op, dims, tol)


@dataclass(frozen=True)
class DecayRow:
    n: int
    full_defect: float
    interior_defect: float


@dataclass(frozen=True)
class DecayTable:
    rows: tuple[DecayRow, ...]

    @property
    def monotone(self) -> bool:
        d = [r.interior_defect for r in self.rows]
        return all(b <= a + 1e-15 for a, b in zip(d, d[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "full_defect", "interior_defect"])
        for r in self.rows:
            w.writerow([r.n, f"{r.full_defect:.17g}", f"{r.interior_defect:.17g}"])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"monotone": self.monotone,
                "rows": [{"n": r.n, "full_defect": r.full_defect, "interior_defect": r.interior_defect}
                         for r in self.rows]}


def commutator_decay_study(op: StructuredOperator, dims, tol: ToleranceConfig = DEFAULT_TOL) -> DecayTable:
    """Self-commutator of the plain truncation against the exact interior compression."""
    rows = []
    for n in _dims(op, dims):
        t = render(op, n)
        full = operator_norm(t.conj().T @ t - t @ t.conj().T)
        interior = is_normal_interior(op, n, tol).defect
        rows.append(DecayRow(n, full, interior))
    return DecayTable(tuple(rows))
