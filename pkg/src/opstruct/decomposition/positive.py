"""Canonical form T = alpha I - K1 + K2 of a positive operator with one essential point."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..classification import FredholmData, estimate_essential_spectrum, is_positive
from ..config import DEFAULT_TOL, ToleranceConfig
from ..errors import Inconsistent, NoEssentialPoint, NotPositive, RankAmbiguity
from ..kernels import hermitian_eig, psd_check
from ..model.operators import StructuredOperator, render
from ..model.profile import SpectralProfile
from .frame import frame_norm


@dataclass(frozen=True)
class PositiveCanonicalForm:
    alpha: float
    K1: np.ndarray
    K2: np.ndarray
    T: np.ndarray
    alpha_source: str = "given"

    def reassemble(self) -> np.ndarray:
        return self.alpha * np.eye(self.T.shape[0]) - self.K1 + self.K2

    def defects(self) -> dict[str, float]:
        n = self.T.shape[0]
        return {
            "reassembly": frame_norm(self.reassemble() - self.T),
            "k1_k2": frame_norm(self.K1 @ self.K2),
            "k1_below_alpha": psd_check(self.alpha * np.eye(n) - self.K1).min_eigenvalue,
            "k1_min_eigenvalue": psd_check(self.K1).min_eigenvalue,
            "k2_min_eigenvalue": psd_check(self.K2).min_eigenvalue,
        }

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "alpha_source": self.alpha_source, "dim": int(self.T.shape[0]),
                "norm_K1": frame_norm(self.K1), "norm_K2": frame_norm(self.K2),
                "rank_K1": int(np.linalg.matrix_rank(self.K1)) if self.K1.size else 0,
                "rank_K2": int(np.linalg.matrix_rank(self.K2)) if self.K2.size else 0,
                "defects": self.defects()}


def resolve_alpha(op: StructuredOperator | None, profile: SpectralProfile | None, alpha: float | None,
                  dims, tol: ToleranceConfig) -> tuple[float, str]:
    """Essential point of |T|: explicit value, then declared profile, then the estimator."""
    if alpha is not None:
        return float(alpha), "given"
    declared = profile if profile is not None else (op.declared_profile if op is not None else None)
    estimate = None
    if op is not None and dims:
        found = estimate_essential_spectrum(op, dims, tol, check_declared=False)
        if len(found.clusters) == 1:
            estimate = found.clusters[0]
    if declared is not None and declared.has_single_essential_point:
        a = declared.alpha
        if estimate is not None and abs(abs(estimate.center) - a) > max(tol.cluster_gap, estimate.uncertainty):
            raise Inconsistent(f"declared essential point {a} but the truncations suggest {estimate.center:.6g}")
        return a, "declared"
    if estimate is not None:
        return abs(estimate.center), "estimated"
    raise NoEssentialPoint("no single essential point is declared or detectable")


def _positive_matrix(source, n: int | None) -> tuple[np.ndarray, StructuredOperator | None]:
    if isinstance(source, StructuredOperator):
        if n is None:
            raise ValueError("an operator needs a rendering dimension")
        return np.array(render(source, n)), source
    return np.asarray(source, dtype=complex), None


def positive_canonical_form(source, n: int | None = None, profile: SpectralProfile | None = None,
                            alpha: float | None = None, dims=None,
                            tol: ToleranceConfig = DEFAULT_TOL) -> PositiveCanonicalForm:
    """K2 is the part of T above alpha, K1 the part below; they live on orthogonal spectral subspaces."""
    t, op = _positive_matrix(source, n)
    check = is_positive(t, tol)
    if not check.holds:
        raise NotPositive(f"operator is not positive (defect {check.defect:.3e})")
    a, src = resolve_alpha(op, profile, alpha, dims, tol)
    t = (t + t.conj().T) / 2
    e = hermitian_eig(t, tol)
    v = e.vectors
    above = np.clip(e.values - a, 0, None)
    below = np.clip(a - e.values, 0, None)
    k2 = (v * above) @ v.conj().T
    k1 = (v * below) @ v.conj().T
    return PositiveCanonicalForm(a, (k1 + k1.conj().T) / 2, (k2 + k2.conj().T) / 2, t, src)


def redecompose(form: PositiveCanonicalForm, tol: ToleranceConfig = DEFAULT_TOL) -> PositiveCanonicalForm:
    """Decompose the reassembled operator again with the same essential point."""
    return positive_canonical_form(form.reassemble(), alpha=form.alpha, tol=tol)


@dataclass(frozen=True)
class PositiveFormAnalysis:
    kernel_dim: int
    kernel_basis: np.ndarray
    k2_on_kernel: float
    k1_on_kernel: float
    norm_k1: float
    noninjective_by_norm: bool
    iff_holds: bool
    fredholm: FredholmData

    def to_json(self) -> dict:
        return {"kernel_dim": self.kernel_dim, "k2_on_kernel": self.k2_on_kernel,
                "k1_on_kernel": self.k1_on_kernel, "norm_K1": self.norm_k1,
                "noninjective_by_norm": self.noninjective_by_norm, "iff_holds": self.iff_holds,
                "fredholm": self.fredholm.to_json()}


def analyze_positive_form(form: PositiveCanonicalForm, tol: ToleranceConfig = DEFAULT_TOL) -> PositiveFormAnalysis:
    """Kernel facts of alpha I - K1 + K2.

    The kernel of T is where K1 acts as alpha and K2 vanishes, so T fails to be
    injective exactly when ||K1|| reaches alpha. Both sides of that equivalence
    use the same threshold eq_tol * alpha.
    """
    a = form.alpha
    t = form.reassemble()
    t = (t + t.conj().T) / 2
    e = hermitian_eig(t, tol)
    thr = tol.eq_tol * a
    kernel = e.vectors[:, np.abs(e.values) <= thr]
    scale = max(1.0, frame_norm(t))
    k2v = frame_norm(form.K2 @ kernel) / scale if kernel.shape[1] else 0.0
    k1v = frame_norm(form.K1 @ kernel - a * kernel) / max(a, np.finfo(float).tiny) if kernel.shape[1] else 0.0
    nk1 = frame_norm(form.K1)
    by_norm = abs(nk1 - a) <= thr
    k = int(kernel.shape[1])
    fred = FredholmData(k, k, 0 if a > 0 else None, a > 0, a)
    return PositiveFormAnalysis(k, kernel, k2v, k1v, nk1, by_norm, by_norm == (k > 0), fred)


@dataclass(frozen=True)
class PositiveBlockReduction:
    null_basis: np.ndarray
    range_basis: np.ndarray
    upper_block: np.ndarray
    lower_block: np.ndarray
    off_diagonal: float
    upper_defect: float
    lower_defect: float

    def to_json(self) -> dict:
        return {"null_dim": int(self.null_basis.shape[1]), "range_dim": int(self.range_basis.shape[1]),
                "off_diagonal": self.off_diagonal, "upper_defect": self.upper_defect,
                "lower_defect": self.lower_defect}


def block_reduce_positive(form: PositiveCanonicalForm, tol: ToleranceConfig = DEFAULT_TOL,
                          ambiguity_band: float = 10.0) -> PositiveBlockReduction:
    """Present T over N(K1) (+) N(K1)^perp; both summands reduce T."""
    e = hermitian_eig(form.K1, tol)
    nk1 = max(abs(e.values[0]), abs(e.values[-1])) if e.values.size else 0.0
    thr = tol.rank_tol * nk1
    if nk1 > 0:
        straddling = (np.abs(e.values) > thr / ambiguity_band) & (np.abs(e.values) < thr * ambiguity_band)
        if np.any(straddling):
            raise RankAmbiguity(f"{int(straddling.sum())} eigenvalue(s) of K1 lie within a factor "
                                f"{ambiguity_band} of the rank threshold {thr:.3e}")
    null_mask = np.abs(e.values) <= thr
    q0, q1 = e.vectors[:, null_mask], e.vectors[:, ~null_mask]
    t = form.T
    a = form.alpha
    upper = q0.conj().T @ t @ q0
    lower = q1.conj().T @ t @ q1
    off = frame_norm(q0.conj().T @ t @ q1)
    k2t = q0.conj().T @ form.K2 @ q0
    k1t = q1.conj().T @ form.K1 @ q1
    up_def = frame_norm(upper - (a * np.eye(q0.shape[1]) + k2t))
    lo_def = frame_norm(lower - (a * np.eye(q1.shape[1]) - k1t))
    return PositiveBlockReduction(q0, q1, upper, lower, off, up_def, lo_def)
