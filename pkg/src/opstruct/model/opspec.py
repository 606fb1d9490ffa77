"""JSON operator-spec files: ``{"kind", "params", "children", "profile"}``.

``parse(serialize(op)) == op`` for every operator built from the AST kinds.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import OpstructError, ParseError
from .operators import (
    KINDS, Adjoint, Block2x2, Compose, DiagonalWithLimit, DirectSum, FiniteMatrix, InterleavedEmbedding, Scale,
    ScaledIdentity, StructuredOperator, Sum, WeightedShift,
)
from .profile import SpectralProfile
from .rules import SequenceRule, _num_from_json


def _scalar_to_json(z) -> float | list:
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def _params(op: StructuredOperator) -> dict:
    if isinstance(op, ScaledIdentity):
        return {"scalar": _scalar_to_json(op.scalar), "size": op.size}
    if isinstance(op, DiagonalWithLimit):
        return {"entries": op.entries.to_json(), "limit": op.limit}
    if isinstance(op, WeightedShift):
        return {"weights": op.weights.to_json()}
    if isinstance(op, FiniteMatrix):
        return {"entries": [[_scalar_to_json(x) for x in row] for row in op.entries]}
    if isinstance(op, Block2x2):
        return {"sizes": list(op.sizes), "labels": list(op.labels)}
    if isinstance(op, Scale):
        return {"scalar": _scalar_to_json(op.scalar)}
    if isinstance(op, InterleavedEmbedding):
        return {"offset": op.offset, "stride": op.stride}
    return {}


def to_json(op: StructuredOperator) -> dict:
    if isinstance(op, Block2x2):
        children = [None if b is None else to_json(b) for b in op.blocks]
    else:
        children = [to_json(c) for c in op.children()]
    out = {"kind": op.kind, "params": _params(op), "children": children}
    if op.declared_profile is not None:
        out["profile"] = op.declared_profile.to_json()
    return out


def serialize(op: StructuredOperator) -> str:
    return json.dumps(to_json(op), indent=2, sort_keys=True) + "\n"


def _scalar(v, locus):
    out = _num_from_json(v, locus)
    return complex(out) if isinstance(out, complex) else out


def _int(params, key, default, locus):
    v = params.get(key, default)
    if v is None:
        return None
    if not isinstance(v, int) or isinstance(v, bool):
        raise ParseError(f"{key} must be an integer", f"{locus}.params.{key}")
    return v


def from_json(data, locus: str = "$") -> StructuredOperator:
    if not isinstance(data, dict):
        raise ParseError("operator spec must be an object", locus)
    unknown = set(data) - {"kind", "params", "children", "profile"}
    if unknown:
        raise ParseError(f"unknown fields {sorted(unknown)}", locus)
    kind = data.get("kind")
    if kind not in KINDS:
        raise ParseError(f"unknown operator kind {kind!r}", f"{locus}.kind")
    params = data.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ParseError("params must be an object", f"{locus}.params")
    raw_children = data.get("children", []) or []
    if not isinstance(raw_children, list):
        raise ParseError("children must be an array", f"{locus}.children")
    children = [None if c is None and kind == "Block2x2" else from_json(c, f"{locus}.children[{i}]")
                for i, c in enumerate(raw_children)]
    profile = None
    if data.get("profile") is not None:
        profile = SpectralProfile.from_json(data["profile"], f"{locus}.profile")

    def need(count):
        if len(children) != count:
            raise ParseError(f"{kind} takes {count} children, got {len(children)}", f"{locus}.children")

    def rule(key):
        if key not in params:
            raise ParseError(f"missing parameter {key!r}", f"{locus}.params")
        return SequenceRule.from_json(params[key], f"{locus}.params.{key}")

    try:
        if kind == "ScaledIdentity":
            need(0)
            return ScaledIdentity(_scalar(params.get("scalar", 1.0), f"{locus}.params.scalar"),
                                  _int(params, "size", None, locus), declared_profile=profile)
        if kind == "DiagonalWithLimit":
            need(0)
            return DiagonalWithLimit(rule("entries"), float(params.get("limit", 0.0)), declared_profile=profile)
        if kind == "WeightedShift":
            need(0)
            return WeightedShift(rule("weights"), declared_profile=profile)
        if kind == "FiniteMatrix":
            need(0)
            rows = params.get("entries")
            if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise ParseError("entries must be an array of rows", f"{locus}.params.entries")
            return FiniteMatrix(tuple(tuple(complex(_scalar(x, f"{locus}.params.entries[{i}]")) for x in r)
                                      for i, r in enumerate(rows)), declared_profile=profile)
        if kind == "DirectSum":
            if not children:
                raise ParseError("DirectSum needs at least one child", f"{locus}.children")
            return DirectSum(tuple(children), declared_profile=profile)
        if kind == "Block2x2":
            need(4)
            sizes = params.get("sizes", [None, None])
            labels = params.get("labels", ["H1", "H2"])
            return Block2x2(tuple(children), tuple(sizes), tuple(labels), declared_profile=profile)
        if kind == "Adjoint":
            need(1)
            return Adjoint(children[0], declared_profile=profile)
        if kind == "Compose":
            need(2)
            return Compose(children[0], children[1], declared_profile=profile)
        if kind == "Sum":
            need(2)
            return Sum(children[0], children[1], declared_profile=profile)
        if kind == "Scale":
            need(1)
            return Scale(_scalar(params.get("scalar", 1.0), f"{locus}.params.scalar"), children[0],
                         declared_profile=profile)
        need(1)
        return InterleavedEmbedding(children[0], _int(params, "offset", 0, locus), _int(params, "stride", 1, locus),
                                    declared_profile=profile)
    except ParseError:
        raise
    except (OpstructError, TypeError, ValueError) as exc:
        raise ParseError(str(exc), locus) from None


def parse(text: str) -> StructuredOperator:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return from_json(data)


def load(path: str | Path) -> StructuredOperator:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read operator spec: {exc.strerror}", str(path)) from None
    return parse(text)


def dump(op: StructuredOperator, path: str | Path) -> None:
    Path(path).write_text(serialize(op), encoding="utf-8")


__all__ = ["to_json", "from_json", "serialize", "parse", "load", "dump"]
