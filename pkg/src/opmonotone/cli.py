"""Command line interface.

Exit codes: 0 success, 1 property violation, 2 input error, 3 numerical
non-convergence.
"""

import argparse
import csv
import json
import sys

import numpy as np

from .errors import InvalidSpec, MaxDepthExceeded, NoConvergence, OMFError
from .measure import from_loewner
from .omf import (
    OMFunction,
    closed_form_oracle,
    convex_normalized_decomposition,
    decompose_function,
    evaluate,
    is_normalized,
    catalog,
)
from .quadrature import QuadratureConfig
from .spec_io import load_loewner, load_measure, measure_to_dict
from .verify import run_verification

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

CHECK_GRID = np.logspace(-2, 2, 33)

# test-only functions that are not operator monotone
FIXTURES = {"square": lambda w: np.asarray(w) ** 2}


def _fmt(v):
    return format(float(v), ".17g")


def _float_list(values):
    out = []
    for v in values:
        out.extend(float(s) for s in str(v).split(",") if s.strip())
    return out


def _config(args):
    return QuadratureConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol, sc_depth=args.sc_depth)


def _catalog_params(args):
    params = {}
    for key in ("alpha", "t", "mass", "depth"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    return params


def _source(args):
    if getattr(args, "spec", None):
        return OMFunction(load_measure(args.spec), args.spec)
    return catalog(args.catalog, **_catalog_params(args))


def _emit_rows(header, rows, fmt, out):
    if fmt == "json":
        json.dump([dict(zip(header, r)) for r in rows], out, indent=2)
        out.write("\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])


def cmd_eval(args, out):
    f = _source(args)
    xs = np.array(_float_list(args.x))
    cfg = _config(args)
    fx = np.atleast_1d(evaluate(f, xs, cfg)) if xs.size else np.array([])
    if args.oracle:
        if args.spec:
            raise InvalidSpec("--oracle needs a catalog source")
        oracle = np.atleast_1d(closed_form_oracle(args.catalog, xs, **_catalog_params(args)))
        rows = [(x, v, o, abs(v - o)) for x, v, o in zip(xs, fx, oracle)]
        _emit_rows(("x", "f", "oracle", "abs_diff"), rows, args.format, out)
    else:
        _emit_rows(("x", "f"), list(zip(xs, fx)), args.format, out)
    return EXIT_OK


def cmd_tabulate(args, out):
    f = _source(args)
    if args.points < 0:
        raise InvalidSpec("--points must be >= 0")
    if args.log:
        if args.xmin <= 0:
            raise InvalidSpec("--log needs --xmin > 0")
        xs = np.logspace(np.log10(args.xmin), np.log10(args.xmax), args.points)
    else:
        xs = np.linspace(args.xmin, args.xmax, args.points)
    fx = np.atleast_1d(evaluate(f, xs, _config(args))) if xs.size else np.array([])
    _emit_rows(("x", "f"), list(zip(xs, fx)), args.format, out)
    return EXIT_OK


def cmd_verify(args, out):
    if args.fixture:
        f, label = FIXTURES[args.fixture], args.fixture
    else:
        f = _source(args)
        label = f.name
    dims = [int(d) for d in _float_list([args.dims])]
    if not dims or any(not 1 <= d <= 16 for d in dims):
        raise InvalidSpec("--dims must list dimensions in 1..16")
    if args.trials < 0:
        raise InvalidSpec("--trials must be >= 0")
    report = run_verification(f, dims, args.trials, args.seed, args.scale, _config(args), label)
    json.dump(report, out, indent=2)
    out.write("\n")
    return EXIT_OK if report["passed"] else EXIT_VIOLATION


def cmd_decompose(args, out):
    f = _source(args)
    cfg = _config(args)
    parts = decompose_function(f)
    masses = {"ac": parts.ac.cached_mass, "sd": parts.sd.cached_mass, "sc": parts.sc.cached_mass}
    whole = evaluate(f, CHECK_GRID, cfg)
    summed = sum(evaluate(p, CHECK_GRID, cfg) for p in parts)
    result = {
        "source": f.name,
        "mass": f.cached_mass,
        "masses": masses,
        "weights": None,
        "parts": {k: measure_to_dict(p.measure) for k, p in zip(("ac", "sd", "sc"), parts)},
        "check": float(np.max(np.abs(whole - summed))),
        "check_grid": {"xmin": 0.01, "xmax": 100.0, "points": len(CHECK_GRID), "log": True},
    }
    if is_normalized(f):
        dec = convex_normalized_decomposition(f)
        result["weights"] = {k: v for k, v in dec.weights.items() if v > 0}
        result["normalized_parts"] = {
            k: measure_to_dict(p.measure)
            for k, p in (("ac", dec.ac), ("sd", dec.sd), ("sc", dec.sc)) if p is not None}
    json.dump(result, out, indent=2)
    out.write("\n")
    return EXIT_OK


def cmd_convert(args, out):
    nu = load_loewner(args.spec)
    mu = from_loewner(nu)
    result = {
        "measure": measure_to_dict(mu),
        "mass_loewner": nu.total_mass(),
        "mass_unit_interval": mu.mass,
    }
    json.dump(result, out, indent=2)
    out.write("\n")
    return EXIT_OK


def _add_source(p, required=True):
    grp = p.add_mutually_exclusive_group(required=required)
    grp.add_argument("--catalog", help="catalog function name")
    grp.add_argument("--spec", help="path to a JSON measure spec")
    p.add_argument("--alpha", type=float, help="exponent for 'power'")
    p.add_argument("--t", type=float, help="weight for 'affine_mean' / 'weighted_harmonic'")
    p.add_argument("--mass", type=float, help="mass for 'cantor'")
    p.add_argument("--depth", type=int, help="recursion depth for 'cantor'")
    return grp


def _add_numeric(p):
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-14)
    p.add_argument("--sc-depth", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="opmonotone",
        description="Operator monotone functions from measures on [0, 1].")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate f at points")
    _add_source(p)
    p.add_argument("--x", nargs="+", required=True, help="points (space or comma separated)")
    p.add_argument("--oracle", action="store_true", help="add the closed form and difference")
    _add_numeric(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tabulate", help="tabulate f on a grid as CSV")
    _add_source(p)
    p.add_argument("--xmin", type=float, default=0.0)
    p.add_argument("--xmax", type=float, default=1.0)
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--log", action="store_true", help="log-spaced grid")
    _add_numeric(p)
    p.set_defaults(func=cmd_tabulate)

    p = sub.add_parser("verify", help="randomized matrix property checks")
    grp = _add_source(p)
    grp.add_argument("--fixture", choices=sorted(FIXTURES), help=argparse.SUPPRESS)
    p.add_argument("--dims", default="2,3")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    _add_numeric(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", help="split f into ac / sd / sc parts")
    _add_source(p)
    _add_numeric(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("convert", help="convert a [0, inf] measure spec to [0, 1]")
    p.add_argument("--from", dest="from_", choices=("loewner",), required=True)
    p.add_argument("--spec", required=True)
    _add_numeric(p)
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (MaxDepthExceeded, NoConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OMFError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
