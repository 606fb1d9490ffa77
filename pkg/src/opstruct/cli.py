"""Command-line interface.

Exit codes: 0 success, 1 a verification or premise failure, 2 bad input.
Set OPSPEC_LOG to DEBUG, INFO or WARNING for log output on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .classification import classify
from .config import DEFAULT_TOL, ToleranceConfig
from .errors import InputError, NumericalError, OpstructError, VerificationError
from .model.operators import StructuredOperator
from .model.opspec import load, serialize

log = logging.getLogger("opstruct")

DEFAULT_DIMS = (64, 128, 256)
FORMS = ("positive", "quasinormal", "hyponormal", "adjoint")


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be comma separated integers, got {text!r}") from None
    if not dims or any(n < 1 for n in dims):
        raise argparse.ArgumentTypeError("dims must be positive")
    if list(dims) != sorted(set(dims)):
        raise argparse.ArgumentTypeError("dims must be strictly ascending")
    return dims


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerances must be positive")
    return v


def _resolve_spec(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    shipped = resources.files("opstruct") / "data" / p.name
    if shipped.is_file():
        return Path(str(shipped))
    return p


def _load(path: str) -> StructuredOperator:
    return load(_resolve_spec(path))


def _clean(x):
    """JSON-safe values: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def dumps(data) -> str:
    return json.dumps(_clean(data), indent=2, sort_keys=True) + "\n"


def _emit(args, name: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        log.info("wrote %s", out / name)
    else:
        sys.stdout.write(text)


def _summary(lines: list[str]) -> str:
    return "\n".join(lines) + "\n"


def _tol(args) -> ToleranceConfig:
    return ToleranceConfig(eq_tol=args.tol_eq, psd_tol=args.tol_psd, rank_tol=DEFAULT_TOL.rank_tol,
                           cluster_gap=DEFAULT_TOL.cluster_gap,
                           interior_margin_factor=DEFAULT_TOL.interior_margin_factor)


# -- commands -----------------------------------------------------------------------


def cmd_analyze(args) -> int:
    op = _load(args.spec)
    report = classify(op, args.dims, _tol(args), mode=args.mode, seed=args.seed)
    data = report.to_json()
    _emit(args, "report.json", dumps(data))
    if args.out:
        lines = [f"analyze {args.spec} at dims {list(args.dims)}"]
        for k, v in sorted(data["flags"].items()):
            lines.append(f"  {k}: {v['holds']} (defect {v['defect']}, {v['mode']})")
        _emit(args, "summary.txt", _summary(lines))
    return 0


def _matrix_csv(a: np.ndarray) -> str:
    rows = ["row,col,re,im"]
    for i, j in zip(*np.nonzero(a)):
        z = complex(a[i, j])
        rows.append(f"{i},{j},{format(z.real, '.17g')},{format(z.imag, '.17g')}")
    return "\n".join(rows) + "\n"


def _nonzero(a: np.ndarray, tol: float) -> list:
    return [[int(i), int(j), float(a[i, j].real), float(a[i, j].imag)]
            for i, j in zip(*np.nonzero(np.abs(a) > tol))]


def cmd_decompose(args) -> int:
    from .decomposition import (
        adjoint_block_form, analyze_positive_form, block_reduce_positive, hyponormal_block_form,
        normal_by_corollary, normality_from_blocks, positive_canonical_form, quasinormal_decompose,
    )

    op = _load(args.spec)
    tol = _tol(args)
    n = args.dims[-1]
    matrices: dict[str, np.ndarray] = {}
    if args.form == "positive":
        form = positive_canonical_form(op, n, dims=args.dims if len(args.dims) >= 3 else None, tol=tol)
        data = {"form": form.to_json(), "analysis": analyze_positive_form(form, tol).to_json(),
                "block_reduction": block_reduce_positive(form, tol).to_json()}
        matrices = {"K1": form.K1, "K2": form.K2}
    elif args.form == "quasinormal":
        d = quasinormal_decompose(op, n, tol=tol)
        premise, normal = normal_by_corollary(d, op.declared_profile, tol)
        data = {"decomposition": d.to_json(), "normal_corollary": {"premise": premise, "normal": normal}}
    elif args.form == "hyponormal":
        f = hyponormal_block_form(op, n, tol=tol)
        data = {"form": f.to_json(), "A_nonzero": _nonzero(f.A, tol.eq_tol),
                "normality": normality_from_blocks(f, tol, source=op).to_json()}
        matrices = {"V0": f.V0, "V1": f.V1, "A": f.A, "B": f.B}
    else:
        f = adjoint_block_form(op, n, tol=tol)
        data = {"form": f.to_json(), "A1_nonzero": _nonzero(f.A1, tol.eq_tol)}
        matrices = {"S0": f.S0, "S1": f.S1, "A1": f.A1, "B1": f.B1}
    data["dim"] = n
    _emit(args, "decomposition.json", dumps(data))
    if args.out:
        for name, m in matrices.items():
            _emit(args, f"{name}.csv", _matrix_csv(m))
    return 0


def cmd_verify(args) -> int:
    """Run the normality criteria; exit 1 unless some premise holds and every holding premise concludes."""
    from .errors import SpectrumUndeclared
    from .normality import (
        check_compact_hyponormal_normal, check_equal_kernels_normal, check_invertible_normal,
        check_weyl_condition_normal,
    )

    op = _load(args.spec)
    tol = _tol(args)
    verdicts = {}
    for name, fn in (("invertible", check_invertible_normal), ("equal_kernels", check_equal_kernels_normal),
                     ("weyl", check_weyl_condition_normal), ("compact", check_compact_hyponormal_normal)):
        try:
            verdicts[name] = fn(op, tol=tol, dims=args.dims).to_json()
        except SpectrumUndeclared as exc:
            verdicts[name] = {"skipped": str(exc)}
    applicable = [v for v in verdicts.values() if v.get("premise_holds")]
    ok = bool(applicable) and all(v["conclusion_normal"] for v in applicable)
    _emit(args, "verdicts.json", dumps({"verdicts": verdicts, "ok": ok}))
    return 0 if ok else 1


def cmd_study(args) -> int:
    from .study import convergence_study, rows_to_csv

    op = _load(args.spec)
    _emit(args, "study.csv", rows_to_csv(convergence_study(op, args.dims, _tol(args))))
    return 0


def cmd_generate(args) -> int:
    from .generate import GeneratorRecipe, generate_family

    params = {"essential": args.essential, "kernel_dim": args.kernel_dim}
    if args.alpha is not None:
        params["alpha"] = args.alpha
    if args.upper is not None:
        params["upper_scalars"] = args.upper
    if args.lower is not None:
        params["lower_scalars"] = args.lower
    if args.tail_coefficient is not None:
        params["tail_coefficient"] = args.tail_coefficient
    if args.size is not None:
        params["size"] = args.size
    GeneratorRecipe(args.cls, **params)  # validate before drawing
    samples = generate_family(args.cls, args.count, seed=args.seed, **params)
    if args.count == 1 and not args.out:
        sys.stdout.write(serialize(samples[0].op))
        return 0
    for i, g in enumerate(samples):
        _emit(args, f"{args.cls}-{i:04d}.json", serialize(g.op))
    return 0


# -- parser -------------------------------------------------------------------------


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    from .generate import ESSENTIAL_KINDS, RECIPE_CLASSES

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dims", type=_dims, default=DEFAULT_DIMS, help="ascending section sizes, e.g. 64,128,256")
    common.add_argument("--tol-eq", type=_positive_float, default=DEFAULT_TOL.eq_tol)
    common.add_argument("--tol-psd", type=_positive_float, default=DEFAULT_TOL.psd_tol)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output directory (default: stdout)")

    p = argparse.ArgumentParser(prog="opstruct", description="Structure of operators in the closure of AN.")
    p.add_argument("--version", action="version", version=f"opstruct {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="classification report")
    a.add_argument("spec")
    a.add_argument("--mode", choices=("symbolic", "numeric", "both"), default="both")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("decompose", parents=[common], help="canonical form or block decomposition")
    d.add_argument("spec")
    d.add_argument("--form", choices=FORMS, required=True)
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", parents=[common], help="normality criteria")
    v.add_argument("spec")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("study", parents=[common], help="finite-section convergence study (CSV)")
    s.add_argument("spec")
    s.set_defaults(func=cmd_study)

    g = sub.add_parser("generate", parents=[common], help="random operator specs of a given class")
    g.add_argument("--class", dest="cls", choices=RECIPE_CLASSES, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--essential", choices=ESSENTIAL_KINDS, default="shift")
    g.add_argument("--kernel-dim", type=int, default=0)
    g.add_argument("--alpha", type=float)
    g.add_argument("--upper", type=_floats)
    g.add_argument("--lower", type=_floats)
    g.add_argument("--tail-coefficient", type=float)
    g.add_argument("--size", type=int)
    g.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    level = os.environ.get("OPSPEC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VerificationError, NumericalError) as exc:
        print(f"verification failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OpstructError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
