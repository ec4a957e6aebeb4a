"""Command-line front end: ``densitylab <verb> [expr ...] [options]``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import constructions, density, measures, polya
from .errors import (
    DomainError, HorizonExceeded, InsufficientElements, InsufficientHorizon, NonConvergent, NotDisjoint,
    OutOfRange, ParseError, PreconditionFailed,
)
from .parse import parse_set_expr
from .setexpr import to_text

EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_NONCONVERGENT = 4
EXIT_VERIFY = 5

VERBS = ("density", "alpha-density", "exact", "polya", "gap", "envelopes", "measure", "witness", "construct",
         "density-set", "verify")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _horizon(text: str) -> int:
    """Accepts integers and powers written as 2^k."""
    try:
        if "^" in text:
            b, e = text.split("^")
            n = int(b) ** int(e)
        else:
            n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid horizon {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("horizon must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="densitylab", description="Densities and density measures of integer sets.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("exprs", nargs="*", help="set expressions (construct takes KIND A B)")
    p.add_argument("--horizon", type=_horizon)
    p.add_argument("--alpha", type=float)
    p.add_argument("--alpha-grid", type=_floats)
    p.add_argument("--theta-list", type=_floats)
    p.add_argument("--target", type=float)
    p.add_argument("--tolerance", type=float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out", type=Path)
    p.add_argument("--spec", help="MeasureSpec JSON, inline or a file path")
    p.add_argument("--num", type=int, default=50, help="number of subsets for density-set")
    p.add_argument("--with-rle", action="store_true", help="include the run-length encoding in construct output")
    return p


class UsageError(Exception):
    pass


def _need(args, n):
    if len(args.exprs) != n:
        raise UsageError(f"{args.verb} takes {n} set expression(s), got {len(args.exprs)}")
    return [parse_set_expr(t) for t in args.exprs]


def _spec(text: str) -> measures.MeasureSpec:
    path = Path(text)
    raw = path.read_text() if not text.lstrip().startswith("{") and path.exists() else text
    try:
        return measures.MeasureSpec.from_json(raw)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"invalid measure spec: {exc}") from None


def _estimate_doc(expr, alpha, horizon, tol):
    doc = density.estimate_alpha_density(expr, alpha, horizon, tol_exist=min(tol, density.TOL_EXIST)).to_json()
    return {"expr": to_text(expr), **doc}


def cmd_density(args):
    (e,) = _need(args, 1)
    return _estimate_doc(e, 0.0, args.horizon or density.DEFAULT_HORIZON, args.tolerance)


def cmd_alpha_density(args):
    (e,) = _need(args, 1)
    h = args.horizon or density.DEFAULT_HORIZON
    if args.alpha_grid:
        return {"expr": to_text(e), "estimates": [_estimate_doc(e, a, h, args.tolerance) for a in args.alpha_grid]}
    if args.alpha is None:
        raise UsageError("alpha-density needs --alpha or --alpha-grid")
    return _estimate_doc(e, args.alpha, h, args.tolerance)


def cmd_exact(args):
    (e,) = _need(args, 1)
    d = density.exact_density(e)
    doc = {"expr": to_text(e), "density": None if d is None else f"{d.numerator}/{d.denominator}"}
    if args.alpha is not None:
        ex = density.exact_alpha_extremes(e, args.alpha)
        doc["alpha"] = args.alpha
        doc["alpha_extremes"] = None if ex is None else list(ex)
    return doc


def cmd_polya(args):
    (e,) = _need(args, 1)
    est = polya.polya_bounds(e, tuple(args.theta_list or polya.DEFAULT_THETAS), args.horizon or density.DEFAULT_HORIZON)
    return {"expr": to_text(e), **est.to_json()}


def cmd_gap(args):
    (e,) = _need(args, 1)
    h = args.horizon or density.DEFAULT_HORIZON
    g = polya.gap_density(e, h)
    return {"expr": to_text(e), "gap_density": None if math.isinf(g) else g, "infinite": math.isinf(g), "horizon": h}


def cmd_envelopes(args):
    (e,) = _need(args, 1)
    grid = args.alpha_grid or [0.0, 1.0, 2.0, 4.0, 8.0]
    lo, hi = polya.alpha_envelopes(e, grid, args.horizon or density.DEFAULT_HORIZON)
    return {"expr": to_text(e), "alpha_grid": grid, "lda_inf": lo, "uda_inf": hi}


def cmd_measure(args):
    (e,) = _need(args, 1)
    if not args.spec:
        raise UsageError("measure needs --spec")
    spec = _spec(args.spec)
    value = measures.evaluate_measure(spec, e, args.horizon, args.tolerance)
    return {"expr": to_text(e), "value": value, "spec": spec.to_json()}


def cmd_witness(args):
    (e,) = _need(args, 1)
    if args.target is None:
        raise UsageError("witness needs --target")
    spec = measures.range_witness(e, args.target, args.horizon or density.DEFAULT_HORIZON)
    value = measures.evaluate_measure(spec, e, args.horizon)
    return {"expr": to_text(e), "target": args.target, "value": value, "spec": spec.to_json()}


_CONSTRUCTIONS = {
    "intermediate": constructions.intermediate_subset,
    "difference": constructions.difference_matching_subset,
    "superset": constructions.corollary_superset,
}


def cmd_construct(args):
    if len(args.exprs) != 3 or args.exprs[0] not in _CONSTRUCTIONS:
        raise UsageError(f"construct takes KIND A B with KIND in {sorted(_CONSTRUCTIONS)}")
    a, b = (parse_set_expr(t) for t in args.exprs[1:])
    h = args.horizon or constructions.CONSTRUCTION_HORIZON
    built = _CONSTRUCTIONS[args.exprs[0]](a, b, h, args.tolerance)
    lo, hi = built.density_bounds()
    doc = {"kind": args.exprs[0], "provenance": built.provenance, "horizon": h, "count": built.count(h),
           "density_bounds": [lo, hi]}
    if args.with_rle:
        doc["rle"] = built.to_rle()
    return doc


def cmd_density_set(args):
    (e,) = _need(args, 1)
    if args.num < 1:
        raise UsageError("--num must be >= 1")
    pts = polya.density_set_sample(e, args.num, args.horizon or (1 << 20), args.seed)
    if (args.format or "csv") == "csv":
        return polya.density_set_csv(pts)
    return {"expr": to_text(e), "seed": args.seed, "points": [list(p) for p in pts]}


def cmd_verify(args):
    from .verify import format_table, run_suite

    results = run_suite()
    ok = all(r.passed for _, r, _ in results)
    if (args.format or "text") == "json":
        doc = {"passed": ok, "checks": [{"group": g, **r.to_json()} for g, r, _ in results]}
        return doc, (0 if ok else EXIT_VERIFY)
    return format_table(results) + "\n", (0 if ok else EXIT_VERIFY)


HANDLERS = {
    "density": cmd_density, "alpha-density": cmd_alpha_density, "exact": cmd_exact, "polya": cmd_polya,
    "gap": cmd_gap, "envelopes": cmd_envelopes, "measure": cmd_measure, "witness": cmd_witness,
    "construct": cmd_construct, "density-set": cmd_density_set, "verify": cmd_verify,
}


def load_schema(name: str) -> dict:
    """The published JSON schema for a verb's document (or "measure_spec")."""
    from importlib.resources import files

    return json.loads(files("densitylab").joinpath("schemas", f"{name}.json").read_text())


def _render(doc) -> str:
    if isinstance(doc, str):
        return doc
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    import numpy as np

    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format == "csv" and args.verb != "density-set":
        print("densitylab: --format csv is only available for density-set", file=sys.stderr)
        return EXIT_PARSE
    try:
        result = HANDLERS[args.verb](args)
        code = 0
        if isinstance(result, tuple):
            result, code = result
    except (ParseError, UsageError) as exc:
        print(f"densitylab: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonConvergent as exc:
        print(f"densitylab: non-convergent: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENT
    except (PreconditionFailed, OutOfRange, InsufficientHorizon, InsufficientElements, HorizonExceeded,
            DomainError, NotDisjoint) as exc:
        print(f"densitylab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    text = _render(result)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
