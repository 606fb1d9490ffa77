"""Spectral-block decomposition of a quasinormal operator with one essential point.

For quasinormal T = W|T| the polar factor commutes with |T|, so every spectral
subspace of |T| reduces W. Restricting W to the eigenspaces above alpha, at
alpha and below alpha gives T = (+) a_i U_i (+) alpha V (+) (+) b_j V_j with U_i,
V_j unitary and V an isometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..classification import am_membership, an_membership, is_normal, is_quasinormal, is_quasinormal_interior
from ..config import DEFAULT_TOL, ToleranceConfig
from ..errors import NoEssentialPoint, NotQuasinormal
from ..model.operators import StructuredOperator
from ..model.profile import SpectralProfile
from .frame import Frame, cluster_values, frame_norm, side_of


@dataclass(frozen=True)
class SpectralBlock:
    scalar: float
    U: np.ndarray
    domain_basis: np.ndarray
    codomain_basis: np.ndarray
    kind: str
    isometry_defect: float
    coisometry_defect: float

    @property
    def dim(self) -> int:
        return int(self.domain_basis.shape[1])

    @property
    def unitary_defect(self) -> float:
        return max(self.isometry_defect, self.coisometry_defect)

    def to_json(self) -> dict:
        return {"scalar": self.scalar, "dim": self.dim, "codim": int(self.codomain_basis.shape[1]),
                "kind": self.kind, "isometry_defect": self.isometry_defect,
                "coisometry_defect": self.coisometry_defect}


@dataclass(frozen=True)
class QuasinormalDecomposition:
    alpha: float
    upper_blocks: tuple[SpectralBlock, ...]
    essential_block: SpectralBlock | None
    lower_blocks: tuple[SpectralBlock, ...]
    variant: str
    reassembly_error: float
    leak: float
    norm: float
    dims: tuple[int, int]

    @property
    def isometry_kind(self) -> str:
        if self.essential_block is None:
            return "absent"
        return self.essential_block.kind

    @property
    def blocks(self) -> tuple[SpectralBlock, ...]:
        mid = () if self.essential_block is None else (self.essential_block,)
        return self.upper_blocks + mid + self.lower_blocks

    def reassemble(self) -> np.ndarray:
        m, n = self.dims[1], self.dims[0]
        out = np.zeros((m, n), dtype=complex)
        for b in self.blocks:
            if b.kind != "kernel":
                out += b.scalar * (b.codomain_basis @ b.U @ b.domain_basis.conj().T)
        return out

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "variant": self.variant, "isometry_kind": self.isometry_kind,
                "upper_blocks": [b.to_json() for b in self.upper_blocks],
                "essential_block": None if self.essential_block is None else self.essential_block.to_json(),
                "lower_blocks": [b.to_json() for b in self.lower_blocks],
                "reassembly_error": self.reassembly_error, "leak": self.leak, "norm": self.norm,
                "domain_dim": self.dims[0], "codomain_dim": self.dims[1]}


def _defects(frame: Frame, qd: np.ndarray, qc: np.ndarray, u: np.ndarray) -> tuple[float, float]:
    iso = frame_norm(u.conj().T @ u - np.eye(u.shape[1]))
    # V V* measured on the domain coordinates, using the polar factor of the codomain frame
    wm = frame.codomain.W
    y = wm @ qc
    z = np.zeros((y.shape[0], qd.shape[1]), dtype=complex)
    z[: qd.shape[0]] = qd
    zy = z.conj().T @ y
    co = frame_norm(zy @ zy.conj().T - np.eye(qd.shape[1]))
    return iso, co


def _variant(profile: SpectralProfile | None) -> str:
    if profile is None:
        return "finite"
    if an_membership(profile):
        return "AN"
    if am_membership(profile):
        return "AM"
    return "closure"


def quasinormal_decompose(source, n: int | None = None, profile: SpectralProfile | None = None,
                          alpha: float | None = None, alpha_is_eigenvalue: bool | None = None,
                          tol: ToleranceConfig = DEFAULT_TOL) -> QuasinormalDecomposition:
    op = source if isinstance(source, StructuredOperator) else None
    frame = Frame(source, n, tol)
    if profile is None and op is not None:
        profile = op.declared_profile
    if op is not None:
        check = is_quasinormal_interior(op, frame.n + (0 if op.dim is not None else tol.interior_margin_factor
                                                       * op.bandwidth), tol)
    else:
        check = is_quasinormal(frame.C, tol)
    if not check.holds:
        raise NotQuasinormal(f"T(T*T) - (T*T)T has norm {check.defect:.3e}")
    if alpha is None:
        if profile is None or not profile.has_single_essential_point:
            raise NoEssentialPoint("quasinormal decomposition needs a single essential point of |T|")
        alpha = profile.alpha
    dom = frame.domain
    if alpha_is_eigenvalue is None:
        if profile is not None and profile.has_single_essential_point:
            alpha_is_eigenvalue = profile.alpha_in_point_spectrum
        else:
            alpha_is_eigenvalue = bool(np.any(np.abs(dom.values - alpha) <= tol.cluster_gap))
    zero_thr = tol.rank_tol * max(frame.norm, np.finfo(float).tiny)
    groups: dict[str, list] = {"upper": [], "essential": [], "lower": []}
    for c in cluster_values(dom.values, tol.cluster_gap):
        groups[side_of(c.scalar, alpha, alpha_is_eigenvalue, tol)].append(c)

    cod = frame.codomain
    leak = 0.0

    def make_block(clusters, scalar, essential=False):
        nonlocal leak
        idx = [i for c in clusters for i in c.indices]
        vals = dom.values[idx]
        qd = dom.vectors[:, idx]
        if scalar <= zero_thr:
            return SpectralBlock(0.0, np.eye(len(idx), dtype=complex), qd, frame.embed(qd), "kernel", 0.0, 0.0)
        lo, hi = vals.min() - tol.cluster_gap, vals.max() + tol.cluster_gap
        qc = cod.vectors[:, (cod.values >= lo) & (cod.values <= hi)]
        wq = dom.W @ qd
        u = qc.conj().T @ wq
        leak = max(leak, frame_norm(wq - qc @ u))
        iso, co = _defects(frame, qd, qc, u)
        if essential:
            kind = "unitary" if co <= tol.eq_tol else "proper-isometry"
        else:
            kind = "unitary"
        return SpectralBlock(float(scalar), u, qd, qc, kind, iso, co)

    upper = tuple(make_block([c], c.scalar) for c in sorted(groups["upper"], key=lambda c: -c.scalar))
    essential = make_block(groups["essential"], alpha, True) if groups["essential"] else None
    lower = tuple(make_block([c], c.scalar) for c in sorted(groups["lower"], key=lambda c: -c.scalar))
    if leak > tol.eq_tol * max(frame.norm, 1.0):
        raise NotQuasinormal(f"polar factor leaks out of the spectral subspaces of |T| (norm {leak:.3e})")
    result = QuasinormalDecomposition(float(alpha), upper, essential, lower, _variant(profile), 0.0, leak,
                                      frame.norm, (frame.n, frame.m))
    err = frame_norm(result.reassemble() - frame.C)
    return QuasinormalDecomposition(result.alpha, upper, essential, lower, result.variant, err, leak,
                                    frame.norm, result.dims)


def normal_by_corollary(decomp: QuasinormalDecomposition, profile: SpectralProfile | None,
                        tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, bool]:
    """(premise, normal): premise is 'alpha not an eigenvalue or its eigenspace is finite'.

    The reassembled operator is tested for normality on the domain block, where
    the essential part is then a unitary (or absent).
    """
    if profile is not None and profile.has_single_essential_point:
        premise = (not profile.alpha_in_point_spectrum) or profile.alpha_eigenspace_dim != float("inf")
    else:
        premise = True
    k = decomp.reassemble()
    square = k[: decomp.dims[0], :]
    return premise, is_normal(square, tol).holds
