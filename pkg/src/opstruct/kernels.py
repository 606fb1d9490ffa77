"""Dense kernels: Hermitian eigensolver, SVD, PSD tests, square roots, polar form.

The production paths call LAPACK through numpy. Cyclic Jacobi (two-sided for
Hermitian eigenproblems, one-sided for the SVD) is implemented here as an
independent reference used to cross-check those results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import subspace_angles

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import NoConvergence, NotHermitian, NotPSD

HERMITIAN_TOL = 1e-12


def _scale(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermitian_defect(a: np.ndarray) -> float:
    return _scale(a - a.conj().T)


def symmetrize(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return (A + A*)/2, refusing inputs that are not Hermitian within tol * scale."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {a.shape}")
    d = hermitian_defect(a)
    if d > tol * max(_scale(a), np.finfo(float).tiny):
        raise NotHermitian(f"Hermitian defect {d:.3e} exceeds {tol:.1e} x scale")
    return (a + a.conj().T) / 2


def _is_diagonal(a: np.ndarray) -> bool:
    return not np.any(a[~np.eye(a.shape[0], dtype=bool)])


@dataclass(frozen=True)
class EigDecomposition:
    values: np.ndarray
    vectors: np.ndarray


class SVDResult(NamedTuple):
    U: np.ndarray
    s: np.ndarray
    V: np.ndarray


@dataclass(frozen=True)
class PolarForm:
    W: np.ndarray
    modulus: np.ndarray
    null_dim: int
    rank: int


class PSDResult(NamedTuple):
    holds: bool
    min_eigenvalue: float


# -- Jacobi reference solvers ---------------------------------------------------------


def _jacobi_rotation(app: float, aqq: float, apq: complex):
    """(c, s, phase) such that J = [[c, s*phase], [-s*conj(phase), c]] diagonalizes the 2x2 block."""
    mag = abs(apq)
    phase = apq / mag
    tau = (aqq - app) / (2 * mag)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
    c = 1 / np.hypot(1.0, t)
    return c, t * c, phase


def jacobi_eigh(a: np.ndarray, max_sweeps: int = 60) -> EigDecomposition:
    """Cyclic Jacobi for complex Hermitian matrices."""
    a = symmetrize(a).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    eps = np.finfo(float).eps
    floor = eps * scale / max(n, 1)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= floor:
                    continue
                rotated = True
                c, s, ph = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * np.conj(ph) * aq
                a[:, q] = s * ph * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * ph * aq
                a[q, :] = s * np.conj(ph) * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(ph) * vq
                v[:, q] = s * ph * vp + c * vq
        if not rotated:
            break
    else:
        raise NoConvergence(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return EigDecomposition(w[order], v[:, order])


def jacobi_svd(a: np.ndarray, max_sweeps: int = 60) -> SVDResult:
    """One-sided (Hestenes) Jacobi SVD; singular values descending."""
    a = np.asarray(a, dtype=complex)
    if a.shape[0] < a.shape[1]:
        r = jacobi_svd(a.conj().T, max_sweeps)
        return SVDResult(r.V, r.s, r.U)
    m, n = a.shape
    u = a.copy()
    v = np.eye(n, dtype=complex)
    eps = np.finfo(float).eps
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = np.vdot(u[:, p], u[:, p]).real
                beta = np.vdot(u[:, q], u[:, q]).real
                gamma = np.vdot(u[:, p], u[:, q])
                if abs(gamma) <= eps * np.sqrt(alpha * beta) or abs(gamma) == 0:
                    continue
                rotated = True
                c, s, ph = _jacobi_rotation(alpha, beta, gamma)
                up, uq = u[:, p].copy(), u[:, q].copy()
                u[:, p] = c * up - s * np.conj(ph) * uq
                u[:, q] = s * ph * up + c * uq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(ph) * vq
                v[:, q] = s * ph * vp + c * vq
        if not rotated:
            break
    else:
        raise NoConvergence(f"one-sided Jacobi SVD did not converge in {max_sweeps} sweeps")
    s = np.linalg.norm(u, axis=0)
    order = np.argsort(-s, kind="stable")
    s, u, v = s[order], u[:, order], v[:, order]
    keep = s > eps * max(s[0] if n else 0.0, np.finfo(float).tiny) * max(m, n)
    U = np.zeros((m, m), dtype=complex)
    U[:, : keep.sum()] = u[:, keep] / s[keep]
    if keep.sum() < m:
        # complete to a unitary basis
        q, _ = np.linalg.qr(np.hstack([U[:, : keep.sum()], np.eye(m, dtype=complex)]))
        U[:, keep.sum():] = q[:, keep.sum(): m]
        U[:, : keep.sum()] = u[:, keep] / s[keep]
    return SVDResult(U, s, v)


# -- production kernels -------------------------------------------------------------


def hermitian_eig(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL, method: str = "lapack") -> EigDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    a = symmetrize(a)
    if method == "jacobi":
        return jacobi_eigh(a)
    if _is_diagonal(a):
        w = np.diag(a).real
        order = np.argsort(w, kind="stable")
        return EigDecomposition(w[order], np.eye(a.shape[0], dtype=complex)[:, order])
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from None
    return EigDecomposition(w, v)


def svd(a: np.ndarray, method: str = "lapack") -> SVDResult:
    """A = U diag(s) V*, singular values descending; U and V square unitary."""
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("svd input has non-finite entries")
    if method == "jacobi":
        return jacobi_svd(a)
    try:
        u, s, vh = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from None
    return SVDResult(u, s, vh.conj().T)


def singular_values(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def operator_norm(a: np.ndarray) -> float:
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0


def min_modulus(a: np.ndarray) -> float:
    """inf ||Ax|| over unit x (zero when A has more columns than rows)."""
    a = np.asarray(a)
    if a.shape[1] == 0:
        return 0.0
    if a.shape[0] < a.shape[1]:
        return 0.0
    return float(singular_values(a)[-1])


def psd_check(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> PSDResult:
    a = symmetrize(a)
    if a.size == 0:
        return PSDResult(True, 0.0)
    w = hermitian_eig(a).values
    lo = float(w[0])
    norm = float(max(abs(w[0]), abs(w[-1])))
    return PSDResult(lo >= -tol.psd_tol * norm, lo)


def sqrt_psd(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    a = symmetrize(a)
    if _is_diagonal(a):
        d = np.diag(a).real
        norm = float(np.max(np.abs(d))) if d.size else 0.0
        if d.size and d.min() < -tol.psd_tol * norm:
            raise NotPSD(f"minimum eigenvalue {d.min():.3e}")
        return np.diag(np.sqrt(np.clip(d, 0, None))).astype(complex)
    e = hermitian_eig(a)
    norm = float(np.max(np.abs(e.values))) if e.values.size else 0.0
    if e.values.size and e.values[0] < -tol.psd_tol * norm:
        raise NotPSD(f"minimum eigenvalue {e.values[0]:.3e}")
    root = (e.vectors * np.sqrt(np.clip(e.values, 0, None))) @ e.vectors.conj().T
    return (root + root.conj().T) / 2


def numerical_rank(s: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Count singular values strictly above rank_tol * s_max (ties count as null)."""
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def polar_decompose(t: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> PolarForm:
    """T = W |T| with N(W) = N(T); rectangular input allowed (W has T's shape)."""
    t = np.asarray(t, dtype=complex)
    m, n = t.shape
    u, s, v = svd(t)
    r = numerical_rank(s, tol)
    w = u[:, :r] @ v[:, :r].conj().T
    k = min(m, n)
    if _is_diagonal_like(t):
        modulus = np.diag(np.abs(np.diag(t[:k, :k])))
        if n > k:
            modulus = np.pad(modulus, ((0, n - k), (0, n - k)))
        modulus = modulus.astype(complex)
    else:
        modulus = (v[:, :k] * s) @ v[:, :k].conj().T
        modulus = (modulus + modulus.conj().T) / 2
    return PolarForm(w, modulus, n - r, r)


def _is_diagonal_like(t: np.ndarray) -> bool:
    m, n = t.shape
    k = min(m, n)
    return not np.any(t - np.pad(np.diag(np.diag(t[:k, :k])), ((0, m - k), (0, n - k))))


def orthonormal_basis(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical range of A."""
    u, s, _ = svd(a)
    return u[:, : numerical_rank(s, tol)]


def null_basis(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical null space of A."""
    a = np.asarray(a, dtype=complex)
    _, s, v = svd(a)
    return v[:, numerical_rank(s, tol):]


def max_principal_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between the column spans of two orthonormal bases."""
    if a.shape[1] != b.shape[1]:
        return float(np.pi / 2)
    if a.shape[1] == 0:
        return 0.0
    return float(np.max(subspace_angles(a, b)))


TRACE_TOL = 1e-12


def trace_identity_defect(t: np.ndarray) -> float:
    """|trace(T*T - TT*)| / (n ||T||^2); zero in exact arithmetic for every square T."""
    t = np.asarray(t, dtype=complex)
    n = t.shape[0]
    norm = operator_norm(t) if t.size else 0.0
    if norm == 0.0:
        return 0.0
    tr = np.trace(t.conj().T @ t) - np.trace(t @ t.conj().T)
    return float(abs(tr) / (n * norm ** 2))


def trace_identity_guard(t: np.ndarray) -> bool:
    return trace_identity_defect(t) <= TRACE_TOL
