"""Finite-section convergence studies as long-format CSV (``n,metric,value``)."""

from __future__ import annotations

import csv
import io
import logging

from .classification import (
    estimate_essential_spectrum, interior_dim, is_hyponormal_interior, is_normal_interior, symbolic_class,
)
from .config import DEFAULT_TOL, ToleranceConfig
from .errors import OpstructError
from .kernels import min_modulus, operator_norm
from .model.operators import StructuredOperator, column_section

log = logging.getLogger(__name__)

HEADER = ("n", "metric", "value")


def format_real(v: float) -> str:
    return format(float(v), ".17g")


def _estimate_dims(n: int) -> tuple[int, int, int] | None:
    dims = (n // 4, n // 2, n)
    return dims if dims[0] >= 4 else None


def convergence_study(op: StructuredOperator, dims, tol: ToleranceConfig = DEFAULT_TOL) -> list[tuple[int, str, float]]:
    """Per-dimension rows: essential point estimate, minimum modulus, interior defects, block defects.

    The essential estimate at n uses the sections at n/4, n/2 and n. Block
    defects are added for operators that are hyponormal (symbolically) with a
    single declared essential point.
    """
    from .decomposition import hyponormal_block_form, positive_canonical_form, quasinormal_decompose

    rows: list[tuple[int, str, float]] = []
    profile = op.declared_profile
    single = profile is not None and profile.has_single_essential_point
    positive = symbolic_class(op, "positive", tol) is True
    quasinormal = symbolic_class(op, "quasinormal", tol) is True
    hyponormal = symbolic_class(op, "hyponormal", tol) is True
    for n in sorted(int(x) for x in dims):
        if op.dim is not None:
            n = min(n, op.dim)
        est = _estimate_dims(n) if op.dim is None else None
        if est is not None:
            found = estimate_essential_spectrum(op, est, tol, check_declared=False)
            for i, c in enumerate(found.clusters):
                name = "essential_estimate" if len(found.clusters) == 1 else f"essential_estimate_{i + 1}"
                rows.append((n, name, abs(c.center) if found.hermitian else c.center))
        c = column_section(op, n)
        rows.append((n, "norm", operator_norm(c)))
        rows.append((n, "min_modulus", min_modulus(c)))
        try:
            interior_dim(op, n, tol)
        except OpstructError:
            continue
        rows.append((n, "hyponormal_interior_min_eigenvalue", is_hyponormal_interior(op, n, tol).defect))
        rows.append((n, "normal_interior_defect", is_normal_interior(op, n, tol).defect))
        if not single:
            continue
        try:
            if positive:
                form = positive_canonical_form(op, n, tol=tol)
                for k, v in sorted(form.defects().items()):
                    rows.append((n, f"positive.{k}", v))
            elif quasinormal:
                d = quasinormal_decompose(op, n, tol=tol)
                rows.append((n, "quasinormal.reassembly_error", d.reassembly_error))
                rows.append((n, "quasinormal.max_unitary_defect",
                             max([b.unitary_defect for b in d.upper_blocks + d.lower_blocks], default=0.0)))
            elif hyponormal:
                f = hyponormal_block_form(op, n, tol=tol)
                for k in ("v1_star_a", "gram_identity", "bb_star_min_margin", "reassembly"):
                    if f.defects[k] is not None:
                        rows.append((n, f"hyponormal.{k}", f.defects[k]))
        except OpstructError as exc:
            log.warning("block defects skipped at n = %d: %s", n, exc)
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for n, metric, value in rows:
        w.writerow([n, metric, format_real(value)])
    return buf.getvalue()
