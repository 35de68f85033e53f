"""Command-line driver.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench
from .approximant import ApproxModel, evaluate, fit_operator, max_error
from .cubature import default_radial_points, integrate_model, product_disk_rule, reference_integral
from .errors import NumericalError, ValidationError
from .nodesets import bos_array, polar_grid, spiral_set

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


def _range(text: str) -> list[int]:
    """``"10:100:10"`` (inclusive stop) or ``"10,20,40"``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, default=float))


def cmd_nodes(args) -> int:
    if args.kind == "bos":
        nodes = bos_array(args.m)
    elif args.kind == "grid":
        nodes = polar_grid(args.n, with_origin=not args.no_origin)
    else:
        nodes = spiral_set(args.nstar if args.nstar else args.n * args.n)
    if args.out:
        nodes.to_csv(args.out)
    else:
        print("x,y,r,theta")
        for row in zip(nodes.x, nodes.y, nodes.r, nodes.theta):
            print(",".join(f"{v:.15g}" for v in row))
    print(f"{nodes.provenance}: {len(nodes)} nodes", file=sys.stderr)
    return EXIT_OK


def _samples(args):
    return bench.sampling_set(args.grid_kind, args.n)


def _degrees(args):
    m = bench.default_m(args.n) if args.m is None else args.m
    rt = bench.default_rtilde(m) if args.rtilde is None else args.rtilde
    return m, rt


def cmd_fit(args) -> int:
    m, rt = _degrees(args)
    f = bench.get_function(args.function)
    model = fit_operator(_samples(args), f, m, rt, method=args.method, metric=args.metric,
                         compute_bound=args.bound)
    model.config["function"] = args.function
    out = {"config": {k: v for k, v in model.config.items()},
           "diagnostics": json.loads(model.fit.diagnostics.to_json()),
           "max_error": max_error(model, f)}
    if args.model_out:
        model.save(args.model_out)
    _print_json(out)
    return EXIT_OK


def cmd_eval(args) -> int:
    model = ApproxModel.load(args.model)
    print(f"{evaluate(model, (args.x, args.y)):.17g}")
    return EXIT_OK


def cmd_errors(args) -> int:
    summary = bench.run_experiment(args.experiment, args.out_dir)
    _print_json(summary)
    return EXIT_OK


def cmd_cubature(args) -> int:
    m, rt = _degrees(args)
    q = args.radial_points or default_radial_points(rt)
    f = bench.get_function(args.function)
    rule = product_disk_rule(q)
    model = fit_operator(_samples(args), f, m, rt, method=args.method)
    value = integrate_model(model, rule)
    ref = reference_integral(f)
    _print_json({"function": args.function, "n": args.n, "m": m, "rtilde": rt,
                 "radial_points": q, "nodes": rule.node_count, "exact_degree": rule.exact_degree,
                 "integral": value, "reference": ref, "error": abs(value - ref)})
    return EXIT_OK


def cmd_normbound(args) -> int:
    rows = bench.normbound_trend(args.n_range, args.grid_kind)
    ok = [r for r in rows if r["status"] == "ok"]
    out = {"rows": rows}
    if len(ok) >= 2:
        out["loglog_slope"] = bench.loglog_slope([r["n"] for r in ok], [r["K_sum"] for r in ok])
    _print_json(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diskir", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("nodes", help="write a node set as x,y,r,theta CSV")
    s.add_argument("--kind", choices=("bos", "grid", "spiral"), required=True)
    s.add_argument("--m", type=int, default=5)
    s.add_argument("--n", type=int, default=20)
    s.add_argument("--nstar", type=int, default=None, help="spiral size (default n^2)")
    s.add_argument("--no-origin", action="store_true", help="grid without the centre point")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_nodes)

    def sampling_args(s):
        s.add_argument("--grid-kind", choices=("grid", "spiral"), default="grid")
        s.add_argument("--n", type=int, default=100)
        s.add_argument("--m", type=int, default=None, help="default n//4")
        s.add_argument("--rtilde", type=int, default=None, help="default m + isqrt(m)")
        s.add_argument("--function", type=int, default=1, choices=range(1, 7))
        s.add_argument("--method", choices=("kkt", "elim"), default="elim")

    s = sub.add_parser("fit", help="fit the operator to a test function")
    sampling_args(s)
    s.add_argument("--metric", choices=("l1", "l2"), default="l1")
    s.add_argument("--bound", action="store_true", help="also compute K1, K2 and the norm bound")
    s.add_argument("--model-out", default=None)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("eval", help="evaluate a saved model")
    s.add_argument("--model", required=True)
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--y", type=float, required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("errors", help="run a benchmark experiment")
    s.add_argument("--experiment", choices=sorted(bench.EXPERIMENTS), required=True)
    s.add_argument("--out-dir", default="results")
    s.set_defaults(func=cmd_errors)

    s = sub.add_parser("cubature", help="integrate a test function through the fitted operator")
    sampling_args(s)
    s.add_argument("--radial-points", type=int, default=None)
    s.set_defaults(func=cmd_cubature)

    s = sub.add_parser("normbound", help="K1 + K2 trend over a range of n")
    s.add_argument("--n-range", type=_range, default=list(range(10, 101, 10)))
    s.add_argument("--grid-kind", choices=("grid", "spiral"), default="grid")
    s.set_defaults(func=cmd_normbound)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "method", None) == "elim":
        args.method = "elimination"
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
