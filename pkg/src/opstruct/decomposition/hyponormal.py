"""Block form of a hyponormal operator with one essential point alpha of |T|.

With H0 the eigenspaces of |T| above alpha, H1 the alpha-eigenspace and H2
the rest, T takes the upper-triangular shape

    [[V0, 0,       0],
     [0,  alpha V1, A],
     [0,  0,        B]]

where V0 is normal, V1 is an isometry, V1*A = 0, A*A + B*B is the diagonal of
squared lower points and BB* is dominated by it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..classification import is_hyponormal_full, is_hyponormal_interior, is_normal, is_normal_interior
from ..config import DEFAULT_TOL, ToleranceConfig
from ..errors import BlockLeak, NoEssentialPoint, NotHyponormal
from ..kernels import psd_check
from ..model.operators import StructuredOperator, adjoint
from ..model.profile import SpectralProfile
from .frame import Frame, cluster_values, frame_norm, side_of


@dataclass(frozen=True)
class HyponormalBlockForm:
    alpha: float
    H0_basis: np.ndarray
    H1_basis: np.ndarray
    H2_basis: np.ndarray
    H0_codomain: np.ndarray
    H1_codomain: np.ndarray
    H2_codomain: np.ndarray
    V0: np.ndarray
    V1: np.ndarray
    A: np.ndarray
    B: np.ndarray
    upper_targets: tuple[tuple[float, int], ...]
    beta_targets: tuple[tuple[float, int], ...]
    beta_diagonal: np.ndarray
    bbstar: np.ndarray
    defects: dict
    norm: float
    dims: tuple[int, int]
    # V1 V1* on the domain part of H1 and the defect of B*B - BB*
    v1_cov: np.ndarray
    b_normality_defect: float

    def reassemble(self) -> np.ndarray:
        out = self.H0_codomain @ self.V0 @ self.H0_basis.conj().T
        out = out + self.alpha * (self.H1_codomain @ self.V1 @ self.H1_basis.conj().T)
        out = out + self.H1_codomain @ self.A @ self.H2_basis.conj().T
        out = out + self.H2_codomain @ self.B @ self.H2_basis.conj().T
        return out

    def split(self) -> dict:
        """T = T1 (+) T2 with T1 = V0 on H0 and T2 the rest."""
        return {"T1_dim": int(self.H0_basis.shape[1]), "T1_normal_defect": self.defects["v0_normal"],
                "T2_dim": int(self.H1_basis.shape[1] + self.H2_basis.shape[1])}

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "dims": {"H0": int(self.H0_basis.shape[1]), "H1": int(self.H1_basis.shape[1]),
                     "H2": int(self.H2_basis.shape[1]), "domain": self.dims[0], "codomain": self.dims[1]},
            "upper_targets": [[v, m] for v, m in self.upper_targets],
            "beta_targets": [[v, m] for v, m in self.beta_targets],
            "defects": dict(self.defects),
            "norm": self.norm,
            "split": self.split(),
        }


def _cod_basis(frame: Frame, vals: np.ndarray, gap: float) -> np.ndarray:
    cod = frame.codomain
    if vals.size == 0:
        return cod.vectors[:, :0]
    mask = np.zeros(cod.values.shape, dtype=bool)
    for v in vals:
        mask |= np.abs(cod.values - v) <= gap
    return cod.vectors[:, mask]


def hyponormal_block_form(source, n: int | None = None, profile: SpectralProfile | None = None,
                          alpha: float | None = None, alpha_is_eigenvalue: bool | None = None,
                          tol: ToleranceConfig = DEFAULT_TOL) -> HyponormalBlockForm:
    op = source if isinstance(source, StructuredOperator) else None
    frame = Frame(source, n, tol)
    if profile is None and op is not None:
        profile = op.declared_profile
    if op is not None:
        big = frame.n + (0 if op.dim is not None else tol.interior_margin_factor * op.bandwidth)
        check = is_hyponormal_interior(op, big, tol)
    else:
        check = is_hyponormal_full(frame.C, tol)
    if not check.holds:
        raise NotHyponormal(f"T*T - TT* has eigenvalue {check.defect:.3e}")
    if alpha is None:
        if profile is None or not profile.has_single_essential_point:
            raise NoEssentialPoint("the hyponormal block form needs a single essential point of |T|")
        alpha = profile.alpha
    dom = frame.domain
    if alpha_is_eigenvalue is None:
        if profile is not None and profile.has_single_essential_point:
            alpha_is_eigenvalue = profile.alpha_in_point_spectrum
        else:
            alpha_is_eigenvalue = bool(np.any(np.abs(dom.values - alpha) <= tol.cluster_gap))

    sides = {"upper": [], "essential": [], "lower": []}
    for c in cluster_values(dom.values, tol.cluster_gap):
        sides[side_of(c.scalar, alpha, alpha_is_eigenvalue, tol)].append(c)
    # peel the upper eigenspaces from the top, one scalar at a time
    upper = sorted(sides["upper"], key=lambda c: -c.scalar)
    i0 = [i for c in upper for i in c.indices]
    i1 = [i for c in sides["essential"] for i in c.indices]
    i2 = [i for c in sides["lower"] for i in c.indices]
    q0, q1, q2 = dom.vectors[:, i0], dom.vectors[:, i1], dom.vectors[:, i2]
    g = tol.cluster_gap
    # H0 is finite and sits inside the domain, so it keeps the same basis on both sides
    p0 = frame.embed(q0)
    p1 = _cod_basis(frame, dom.values[i1], g)
    taken = np.hstack([p0, p1])
    # H2 on the codomain side is everything not in H0 or H1
    cod = frame.codomain
    rest = np.ones(cod.values.shape, dtype=bool)
    if taken.shape[1]:
        rest &= np.linalg.norm(taken.conj().T @ cod.vectors, axis=0) < 0.5
    p2 = cod.vectors[:, rest]

    c = frame.C
    tq0, tq1, tq2 = c @ q0, c @ q1, c @ q2
    V0 = p0.conj().T @ tq0
    A = p1.conj().T @ tq2
    B = p2.conj().T @ tq2
    T11 = p1.conj().T @ tq1
    V1 = T11 / alpha if alpha > 0 else np.zeros_like(T11)
    norm = frame.norm
    scale = max(norm, np.finfo(float).tiny)

    leaks = {
        "H1_to_H0": frame_norm(p0.conj().T @ tq1), "H2_to_H0": frame_norm(p0.conj().T @ tq2),
        "H0_to_H1": frame_norm(p1.conj().T @ tq0), "H0_to_H2": frame_norm(p2.conj().T @ tq0),
        "H1_to_H2": frame_norm(p2.conj().T @ tq1),
    }
    worst = max(leaks, key=leaks.get)
    if leaks[worst] > tol.eq_tol * scale:
        raise BlockLeak(f"block {worst} should vanish", leaks[worst])

    betas = dom.values[i2]
    beta_sq = np.diag(betas ** 2).astype(complex)
    # BB* on the domain part of H2: P_H2 T T* P_H2, exact from the row section
    bbstar = q2.conj().T @ frame.row_gram() @ q2
    bb_psd = psd_check(beta_sq - (bbstar + bbstar.conj().T) / 2, tol) if betas.size else None
    a_rows = q1.conj().T @ frame.rows(p2) if q1.shape[1] else np.zeros((0, p2.shape[1]))
    # V1 V1* on the domain part of H1 from P_H1 T T* P_H1 - A A*
    tt1 = q1.conj().T @ frame.row_gram() @ q1
    v1v1 = (tt1 - a_rows @ a_rows.conj().T) / alpha ** 2 if alpha > 0 else np.zeros_like(tt1)
    # B normality on the domain part of H2: B*B = beta^2 - A*A against BB*
    b_star_b = beta_sq - A.conj().T @ A
    b_normal = frame_norm(b_star_b - bbstar)
    defects = {
        "v1_star_a": frame_norm(V1.conj().T @ A),
        "gram_identity": frame_norm(A.conj().T @ A + B.conj().T @ B - beta_sq),
        "bb_star_min_margin": None if bb_psd is None else bb_psd.min_eigenvalue,
        "bb_star_dominated": True if bb_psd is None else bb_psd.holds,
        "bb_star_equality": frame_norm(beta_sq - bbstar),
        "v1_isometry": frame_norm(V1.conj().T @ V1 - np.eye(V1.shape[1])) if alpha > 0 else 0.0,
        "v1_coisometry": frame_norm(v1v1 - np.eye(v1v1.shape[0])) if v1v1.size else 0.0,
        "v0_normal": is_normal(V0, tol).defect if V0.shape[0] == V0.shape[1] else float("inf"),
        "b_normal": b_normal,
        "leaks": leaks,
    }
    upper_targets = tuple((c.scalar, c.multiplicity) for c in upper)
    beta_targets = tuple((c.scalar, c.multiplicity) for c in sorted(sides["lower"], key=lambda c: -c.scalar))
    form = HyponormalBlockForm(float(alpha), q0, q1, q2, p0, p1, p2, V0, V1, A, B, upper_targets, beta_targets,
                               beta_sq, bbstar, defects, norm, (frame.n, frame.m), v1v1, b_normal)
    defects["reassembly"] = frame_norm(form.reassemble() - c)
    return form


@dataclass(frozen=True)
class BlockNormality:
    normal: bool
    v1_unitary: bool
    b_normal: bool
    v1_coisometry_defect: float
    b_normality_defect: float
    direct: bool | None
    direct_defect: float | None

    @property
    def agrees(self) -> bool | None:
        return None if self.direct is None else self.direct == self.normal

    def to_json(self) -> dict:
        return {"normal": self.normal, "v1_unitary": self.v1_unitary, "b_normal": self.b_normal,
                "v1_coisometry_defect": self.v1_coisometry_defect, "b_normality_defect": self.b_normality_defect,
                "direct": self.direct, "direct_defect": self.direct_defect, "agrees": self.agrees}


def normality_from_blocks(form: HyponormalBlockForm, tol: ToleranceConfig = DEFAULT_TOL,
                          source=None) -> BlockNormality:
    """T is normal iff V1 is unitary (or zero) and B is normal; cross-checked against T directly."""
    scale = max(form.norm, np.finfo(float).tiny)
    v1_zero = form.V1.size == 0 or frame_norm(form.V1) <= tol.eq_tol
    co = form.defects["v1_coisometry"]
    v1_unitary = v1_zero or co <= tol.eq_tol
    b_ok = form.b_normality_defect <= tol.eq_tol * scale ** 2
    if form.dims[0] == form.dims[1] and form.B.size:
        # a square frame holds B exactly, so test it directly as well
        b_ok = b_ok and is_normal(form.B, tol).holds
    verdict = bool(v1_unitary and b_ok)
    direct = direct_defect = None
    if isinstance(source, StructuredOperator):
        chk = is_normal_interior(source, form.dims[0] + (0 if source.dim is not None
                                                         else tol.interior_margin_factor * source.bandwidth), tol)
        direct, direct_defect = chk.holds, chk.defect
    elif source is not None:
        chk = is_normal(np.asarray(source, dtype=complex), tol)
        direct, direct_defect = chk.holds, chk.defect
    return BlockNormality(verdict, bool(v1_unitary), bool(b_ok), co, form.b_normality_defect, direct, direct_defect)


@dataclass(frozen=True)
class AdjointBlockForm:
    """Lower-triangular form of T from the hyponormal block form of T*."""

    S0: np.ndarray
    S1: np.ndarray
    A1: np.ndarray
    B1: np.ndarray
    base: HyponormalBlockForm
    defects: dict

    def to_json(self) -> dict:
        out = self.base.to_json()
        out["defects"] = dict(self.defects)
        return out


def adjoint_block_form(source, n: int | None = None, profile: SpectralProfile | None = None,
                       alpha: float | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> AdjointBlockForm:
    """``profile`` (if given) describes |T*|; for an operator it defaults to the profile declared on T*."""
    if isinstance(source, StructuredOperator):
        star = adjoint(source)
    else:
        star = np.asarray(source, dtype=complex).conj().T
    base = hyponormal_block_form(star, n, profile, alpha, tol=tol)
    S0, S1, A1, B1 = base.V0.conj().T, base.V1.conj().T, base.A.conj().T, base.B.conj().T
    defects = {
        "s1_coisometry": frame_norm(S1 @ S1.conj().T - np.eye(S1.shape[0])) if S1.size else 0.0,
        "s1_a1_star": frame_norm(S1 @ A1.conj().T),
        "gram_identity": frame_norm(A1 @ A1.conj().T + B1 @ B1.conj().T - base.beta_diagonal),
        "b1_star_b1_dominated": base.defects["bb_star_dominated"],
        "b1_star_b1_min_margin": base.defects["bb_star_min_margin"],
        "reassembly": base.defects["reassembly"],
    }
    return AdjointBlockForm(S0, S1, A1, B1, base, defects)
