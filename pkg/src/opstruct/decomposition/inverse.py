"""Inverse of an invertible operator from the canonical form of its modulus.

If |T| = alpha I - K1 + K2 with alpha > 0 then
|T|^{-1} = alpha^{-1} I + K3 with K3 = alpha^{-1} (K1 - K2) |T|^{-1},
so the inverse again has a single essential point of its modulus, 1/alpha.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT_TOL, ToleranceConfig
from ..errors import AlphaZero, NotInvertible
from ..kernels import min_modulus
from ..model.operators import StructuredOperator
from ..model.profile import SpectralProfile
from .frame import Frame, frame_norm
from .positive import PositiveCanonicalForm, positive_canonical_form, resolve_alpha


@dataclass(frozen=True)
class InverseResult:
    T_inverse: np.ndarray
    modulus_inverse: np.ndarray
    K3: np.ndarray
    form: PositiveCanonicalForm
    modulus_defect: float
    left_inverse_defect: float
    oracle_defect: float
    k3_singular_values: np.ndarray

    def to_json(self) -> dict:
        return {"alpha": self.form.alpha, "inverse_alpha": 1.0 / self.form.alpha,
                "norm_K3": frame_norm(self.K3), "norm_modulus_inverse": frame_norm(self.modulus_inverse),
                "modulus_defect": self.modulus_defect, "left_inverse_defect": self.left_inverse_defect,
                "oracle_defect": self.oracle_defect,
                "K3_leading_singular_values": [float(s) for s in self.k3_singular_values[:8]]}


def k3_from_form(form: PositiveCanonicalForm) -> np.ndarray:
    a = form.alpha
    if a <= 0:
        raise AlphaZero("the inverse formula needs a positive essential point")
    t = a * np.eye(form.T.shape[0]) - form.K1 + form.K2
    # (K1 - K2) t^{-1} = (t^{-1} (K1 - K2))^* since both factors are Hermitian
    x = np.linalg.solve(t, form.K1 - form.K2)
    return x.conj().T / a


def invert_closure_an(source, n: int | None = None, profile: SpectralProfile | None = None,
                      alpha: float | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> InverseResult:
    """Inverse of T = W|T| via |T|^{-1} = alpha^{-1} I + K3 and T^{-1} = |T|^{-1} W*.

    For an operator on l2 the domain block of T^{-1} is computed from the exact
    column section, so it is a left inverse of that section.
    """
    frame = Frame(source, n, tol)
    c = frame.C
    norm = frame.norm
    m = min_modulus(c)
    if m <= tol.rank_tol * max(norm, np.finfo(float).tiny):
        raise NotInvertible(f"minimum modulus {m:.3e} is below rank_tol * ||T||")
    op = source if isinstance(source, StructuredOperator) else None
    if profile is None and op is not None:
        profile = op.declared_profile
    if profile is not None and profile.cokernel_dim not in (0, None):
        raise NotInvertible(f"declared cokernel has dimension {profile.cokernel_dim}")
    if alpha is None:
        alpha, _ = resolve_alpha(None, profile, None, None, tol)
    if alpha <= 0:
        raise AlphaZero("an invertible operator on an infinite dimensional space has alpha > 0")
    dom = frame.domain
    v = dom.vectors
    modulus = (v * dom.values) @ v.conj().T
    modulus = (modulus + modulus.conj().T) / 2
    form = positive_canonical_form(modulus, alpha=alpha, tol=tol)
    k3 = k3_from_form(form)
    inv_mod = np.eye(frame.n) / form.alpha + k3
    # dense oracle for |T|^{-1}
    oracle = np.linalg.inv(modulus)
    scale = frame_norm(oracle)
    mod_defect = frame_norm(inv_mod - oracle) / scale
    t_inv = inv_mod @ dom.W.conj().T
    left = frame_norm(t_inv @ c - np.eye(frame.n))
    if frame.square:
        oracle_defect = frame_norm(t_inv - np.linalg.inv(c)) / max(frame_norm(t_inv), np.finfo(float).tiny)
    else:
        oracle_defect = frame_norm(t_inv - np.linalg.pinv(c)) / max(frame_norm(t_inv), np.finfo(float).tiny)
    sv = np.linalg.svd(k3, compute_uv=False)
    return InverseResult(t_inv, inv_mod, k3, form, mod_defect, left, oracle_defect, sv)
