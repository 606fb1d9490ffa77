"""Closed-form sequence rules ``k -> value`` (k is 1-based).

A rule is either an explicit list of leading values, a restricted Python
expression in ``k``, or both (the list covers ``k <= len(values)`` and the
expression takes over afterwards). Expressions are parsed once with :mod:`ast`
and only a small whitelist of node types and functions is accepted, so a rule
read from a JSON file cannot execute arbitrary code.
"""

from __future__ import annotations

import ast
import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import ParseError, UndefinedSequenceIndex


def _sqrt(x):
    if isinstance(x, complex) or x < 0:
        return cmath.sqrt(x)
    return math.sqrt(x)


_FUNCTIONS = {
    "sqrt": _sqrt,
    "exp": lambda x: cmath.exp(x) if isinstance(x, complex) else math.exp(x),
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "abs": abs,
    "min": min,
    "max": max,
    "floor": math.floor,
    "ceil": math.ceil,
    "conj": lambda x: complex(x).conjugate(),
}
_CONSTANTS = {"pi": math.pi, "e": math.e}

_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.BoolOp, ast.Compare, ast.IfExp,
    ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.Mod, ast.FloorDiv,
    ast.USub, ast.UAdd, ast.Not, ast.And, ast.Or,
    ast.Eq, ast.NotEq, ast.Lt, ast.LtE, ast.Gt, ast.GtE,
)


@lru_cache(maxsize=512)
def _compile(expr: str):
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"invalid expression {expr!r}: {exc.msg}", "rule.expr") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ParseError(f"disallowed syntax {type(node).__name__} in {expr!r}", "rule.expr")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                raise ParseError(f"unknown function in {expr!r}", "rule.expr")
            if node.keywords:
                raise ParseError(f"keyword arguments not allowed in {expr!r}", "rule.expr")
        if isinstance(node, ast.Name) and node.id not in _FUNCTIONS \
                and node.id not in _CONSTANTS and node.id != "k":
            raise ParseError(f"unknown name {node.id!r} in {expr!r}", "rule.expr")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float, complex)):
            raise ParseError(f"only numeric constants allowed in {expr!r}", "rule.expr")
    names = {n.id for n in ast.walk(tree) if isinstance(n, ast.Name)}
    return compile(tree, "<rule>", "eval"), "k" in names


@dataclass(frozen=True)
class SequenceRule:
    expr: str | None = None
    values: tuple[complex | float, ...] = ()
    _code: object = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.expr is None and not self.values:
            raise ParseError("a rule needs an expression or explicit values", "rule")
        object.__setattr__(self, "values", tuple(_clean(v) for v in self.values))
        if self.expr is not None:
            object.__setattr__(self, "_code", _compile(self.expr)[0])

    @classmethod
    def const(cls, value) -> "SequenceRule":
        return cls(expr=repr(_clean(value)))

    @property
    def is_constant(self) -> bool:
        """True when the rule provably takes one value for every k."""
        return not self.values and self.expr is not None and not _compile(self.expr)[1]

    @property
    def is_finite(self) -> bool:
        return self.expr is None

    def __call__(self, k: int):
        if k < 1:
            raise UndefinedSequenceIndex(f"sequence index {k} < 1")
        if k <= len(self.values):
            return self.values[k - 1]
        if self.expr is None:
            raise UndefinedSequenceIndex(
                f"rule has {len(self.values)} explicit values and no expression; index {k} undefined")
        env = dict(_FUNCTIONS)
        env.update(_CONSTANTS)
        env["k"] = k
        try:
            value = eval(self._code, {"__builtins__": {}}, env)  # noqa: S307 - whitelisted AST
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise UndefinedSequenceIndex(f"rule {self.expr!r} undefined at k={k}: {exc}") from None
        return _clean(value)

    def evaluate(self, count: int) -> np.ndarray:
        """Values for k = 1..count as a complex array (read-only, cached)."""
        return _evaluate_cached(self, count)

    def to_json(self) -> dict:
        out: dict = {}
        if self.values:
            out["values"] = [_num_to_json(v) for v in self.values]
        if self.expr is not None:
            out["expr"] = self.expr
        return out

    @classmethod
    def from_json(cls, data, locus: str = "rule") -> "SequenceRule":
        if isinstance(data, str):
            return cls(expr=data)
        if isinstance(data, (int, float)):
            return cls.const(data)
        if not isinstance(data, dict):
            raise ParseError("rule must be a string, number or object", locus)
        unknown = set(data) - {"expr", "values"}
        if unknown:
            raise ParseError(f"unknown rule fields {sorted(unknown)}", locus)
        values = tuple(_num_from_json(v, f"{locus}.values") for v in data.get("values", ()))
        return cls(expr=data.get("expr"), values=values)


@lru_cache(maxsize=256)
def _evaluate_cached(rule: SequenceRule, count: int) -> np.ndarray:
    out = np.array([rule(k) for k in range(1, count + 1)], dtype=complex)
    if not np.all(np.isfinite(out)):
        raise UndefinedSequenceIndex(f"rule {rule.expr!r} produced a non-finite value")
    out.flags.writeable = False
    return out


def _clean(v):
    if isinstance(v, bool):
        raise ParseError("booleans are not sequence values", "rule")
    if isinstance(v, complex):
        return v.real if v.imag == 0 else v
    if isinstance(v, (int, np.integer)):
        return float(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, np.complexfloating):
        return _clean(complex(v))
    raise ParseError(f"non-numeric sequence value {v!r}", "rule")


def _num_to_json(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _num_from_json(v, locus: str):
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1]) if v[1] != 0 else float(v[0])
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    raise ParseError(f"expected a number or [re, im], got {v!r}", locus)
