"""Command-line interface: density grids, manipulation tests, simulations.

Exit codes: 0 success, 1 fatal error (one machine-parsable reason line on
stderr), 2 partial per-point failures on a density grid. No subcommand
mutates its input; outputs go to stdout or a fresh file.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from . import density as density_mod
from . import simulation
from .errors import LpDensError
from .maniptest import rbc_test
from .sample import load_csv


def _reason_tag(exc: Exception) -> str:
    if isinstance(exc, FileNotFoundError):
        return "input-not-found"
    # CamelCase class name to kebab-case tag, e.g. EmptySide -> empty-side
    return re.sub(r"(?<!^)(?=[A-Z])", "-", type(exc).__name__).lower()


def _fail(exc: Exception) -> int:
    print(f"error: {_reason_tag(exc)}", file=sys.stderr)
    return 1


def _emit(text: str, output_path: str | None) -> None:
    if output_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output_path, "w") as fh:
            fh.write(text)


def _default_threads() -> int:
    return int(os.environ.get("LPDENS_THREADS", "1"))


def cmd_density(args) -> int:
    try:
        sample = load_csv(args.input)
        if args.grid_points is not None:
            grid = args.grid_points
        else:
            grid = density_mod.default_grid(sample, args.grid)
        if args.bandwidth == "auto":
            policy, fixed_h = "mse_pointwise", None
        else:
            policy, fixed_h = "fixed", float(args.bandwidth)
        estimates = density_mod.estimate_grid(
            sample, grid, p=args.p, v=args.v, kernel=args.kernel,
            bw_policy=policy, fixed_h=fixed_h, alpha=args.alpha,
        )
    except (LpDensError, OSError, ValueError) as exc:
        return _fail(exc)

    text = (density_mod.to_csv if args.format == "csv" else density_mod.to_json)(estimates)
    _emit(text, args.output)
    failed = [e for e in estimates if e.error is not None]
    for e in failed:
        print(f"warning: x={e.x} {e.error}", file=sys.stderr)
    return 2 if failed else 0


def cmd_test(args) -> int:
    try:
        sample = load_csv(args.input)
        result = rbc_test(sample, args.cutoff, p=args.p, kernel=args.kernel, model=args.model)
    except (LpDensError, OSError, ValueError) as exc:
        return _fail(exc)
    _emit(json.dumps(result.record(), indent=2), args.output)
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    try:
        design = simulation.load_design(args.design)
        if args.seed is not None:
            design = simulation.SimDesign(**{**design.__dict__, "seed": args.seed})
        rows = simulation.run_design(design, threads=args.threads)
    except (OSError, ValueError, KeyError, LpDensError, json.JSONDecodeError) as exc:
        return _fail(exc)
    text = (simulation.summary_to_csv if args.format == "csv" else simulation.summary_to_json)(rows)
    _emit(text, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpdens",
        description="Boundary-adaptive local polynomial density estimation.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--input", required=True, help="single-column CSV of observations")
        sp.add_argument("--output", default=None, help="output file (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json",
                        help="output format (default: json)")
        sp.add_argument("--p", type=int, default=2, help="polynomial order (default: 2)")
        sp.add_argument("--kernel", choices=("triangular", "epanechnikov", "uniform"),
                        default="triangular", help="kernel family (default: triangular)")

    sp = sub.add_parser("density", help="estimate the density over a grid")
    common(sp)
    sp.add_argument("--v", type=int, default=1, help="derivative order (default: 1)")
    sp.add_argument("--grid", type=int, default=25,
                    help="number of quantile grid points (default: 25)")
    sp.add_argument("--grid-points", type=lambda s: [float(t) for t in s.split(",")],
                    default=None, help="explicit comma-separated evaluation points")
    sp.add_argument("--bandwidth", default="auto",
                    help="'auto' for pointwise MSE-optimal, or a fixed value (default: auto)")
    sp.add_argument("--alpha", type=float, default=0.05,
                    help="CI significance level (default: 0.05)")
    sp.add_argument("--threads", type=int, default=_default_threads(),
                    help="worker threads (default: LPDENS_THREADS or 1)")
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("test", help="density-discontinuity test at a cutoff")
    common(sp)
    sp.add_argument("--cutoff", type=float, required=True, help="known cutoff location")
    sp.add_argument("--model", choices=("unrestricted", "restricted", "separate"),
                    default="unrestricted", help="cutoff model (default: unrestricted)")
    sp.set_defaults(func=cmd_test)

    sp = sub.add_parser("simulate", help="run a Monte Carlo design file")
    sp.add_argument("--design", required=True, help="JSON design file")
    sp.add_argument("--output", default=None, help="output file (default: stdout)")
    sp.add_argument("--format", choices=("json", "csv"), default="json",
                    help="output format (default: json)")
    sp.add_argument("--seed", type=int, default=None, help="override the design seed")
    sp.add_argument("--threads", type=int, default=_default_threads(),
                    help="worker threads; output is thread-count invariant")
    sp.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
