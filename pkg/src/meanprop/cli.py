"""Command-line interface: ``meanprop {test,fieller,density,simulate,verify}``.

Exit codes: 0 when the computation succeeds (a rejected hypothesis is a
result, not a failure), 2 for usage errors and unreadable or inconsistent
inputs, 3 for numerical failures and failed verification.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import dominance
from .core import Sample, fieller_interval, proportionality_test
from .exceptions import DimensionError, DomainError
from .fileio import format_float, read_matrix, read_vector
from .montecarlo import SimulationConfig, simulate_cdf, simulate_sizes
from .wishart import NoncentralSpec, lambda2_cdf, noncentral_marginal_density

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _json_float(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def _grid(text):
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be 'start:stop:count', got {text!r}") from None
    if count < 1 or start < 0 or stop < start:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}")
    return np.linspace(start, stop, count)


def _alphas(text):
    try:
        values = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"alphas must be comma-separated numbers, got {text!r}") from None
    return values


def _load_sample(args):
    try:
        x = read_vector(args.x)
        y = read_vector(args.y)
        sigma = read_matrix(args.sigma) if args.sigma else None
    except OSError as exc:
        raise UsageError(f"cannot read input: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"malformed input: {exc}") from None
    try:
        return Sample(x, y, sigma)
    except (DimensionError, DomainError) as exc:
        raise UsageError(str(exc)) from None


def cmd_test(args, out):
    sample = _load_sample(args)
    if not (0.0 < args.alpha < 1.0):
        raise UsageError(f"alpha must lie in (0, 1), got {args.alpha}")
    outcome = proportionality_test(sample, args.alpha)
    record = {k: _json_float(v) for k, v in outcome.asdict().items()}
    if args.json:
        out.write(json.dumps(record) + "\n")
    else:
        beta = "inf" if math.isinf(outcome.beta_hat) else format_float(outcome.beta_hat)
        out.write(f"statistic: {format_float(outcome.statistic)}\n")
        out.write(f"df: {outcome.df}\n")
        out.write(f"p-value: {format_float(outcome.p_value)}\n")
        out.write(f"beta_hat: {beta}\n")
        out.write(f"reject: {str(outcome.reject).lower()}\n")
    return EXIT_OK


def cmd_fieller(args, out):
    sample = _load_sample(args)
    if not (0.0 < args.level < 1.0):
        raise UsageError(f"level must lie in (0, 1), got {args.level}")
    interval = fieller_interval(sample, args.level)
    record = {k: _json_float(v) for k, v in interval.asdict().items()}
    if args.json:
        out.write(json.dumps(record) + "\n")
    else:
        out.write(f"kind: {interval.kind}\n")
        if interval.kind in ("bounded", "complement"):
            out.write(f"lower: {format_float(interval.lower)}\n")
            out.write(f"upper: {format_float(interval.upper)}\n")
        out.write(f"level: {format_float(interval.level)}\n")
    return EXIT_OK


def cmd_density(args, out):
    try:
        spec = NoncentralSpec(args.p, args.kappa)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    grid = args.grid
    if args.cdf:
        values = np.atleast_1d(lambda2_cdf(spec, grid))
        out.write("lambda2,cdf\n")
    else:
        values = [noncentral_marginal_density(spec, float(x)) for x in grid]
        out.write("lambda2,density\n")
    for x, v in zip(grid, values):
        out.write(f"{format_float(x)},{format_float(v)}\n")
    return EXIT_OK


def cmd_simulate(args, out):
    try:
        config = SimulationConfig(args.p, args.kappa, args.reps, args.seed, args.alphas)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if args.cdf_grid is not None:
        ecdf = simulate_cdf(config, args.cdf_grid, workers=args.workers)
        out.write("lambda2,ecdf\n")
        for x, v in zip(ecdf.grid, ecdf.cdf):
            out.write(f"{format_float(x)},{format_float(v)}\n")
        return EXIT_OK
    table = simulate_sizes(config, workers=args.workers)
    out.write("p,kappa,alpha,reps,rejections,size,stderr\n")
    for row in table.rows:
        out.write(
            f"{row.p},{format_float(row.kappa)},{format_float(row.alpha)},{row.reps},"
            f"{row.rejections},{format_float(row.size)},{format_float(row.stderr)}\n"
        )
    return EXIT_OK


def cmd_verify(args, out, extra_checks=()):
    if args.jmax < 2:
        raise UsageError("--jmax must be at least 2")
    reports = dominance.run_all_checks(args.jmax, extra_checks=extra_checks)
    summary = dominance.aggregate(reports)
    text = json.dumps(summary, indent=2, default=_json_float)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            out.write(f"{status} {r.check_name} checked={r.n_checked} violations={r.n_violations}\n")
    else:
        out.write(text + "\n")
    if not summary["passed"]:
        failed = [r for r in reports if not r.passed]
        for r in failed:
            sys.stderr.write(f"verification failed: {r.check_name}: {r.n_violations} violations, e.g. {r.violations[:3]}\n")
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="meanprop", description="Test for proportional mean vectors and tools for its null distribution.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_data(p):
        p.add_argument("--x", required=True, help="file with the X observation vector")
        p.add_argument("--y", required=True, help="file with the Y observation vector")
        p.add_argument("--sigma", help="file with the known covariance matrix")
        p.add_argument("--json", action="store_true", help="emit a JSON object")

    p = sub.add_parser("test", help="likelihood-ratio chi-square test of proportional means")
    add_data(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("fieller", help="Fieller confidence set for the slope")
    add_data(p)
    p.add_argument("--level", type=float, required=True)
    p.set_defaults(func=cmd_fieller)

    p = sub.add_parser("density", help="exact density or CDF of the statistic, as CSV")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--grid", type=_grid, required=True, help="start:stop:count")
    p.add_argument("--cdf", action="store_true")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("simulate", help="Monte Carlo sizes or empirical CDF, as CSV")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alphas", type=_alphas, default=(0.01, 0.05, 0.1))
    p.add_argument("--cdf-grid", type=_grid, default=None, help="start:stop:count")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check the inequalities behind the dominance theorem")
    p.add_argument("--jmax", type=int, default=200)
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None, *, _extra_checks=()):
    """Entry point; returns the exit code.

    ``_extra_checks`` is a test hook appended to the ``verify`` suite.
    """
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        if args.func is cmd_verify:
            return cmd_verify(args, out, _extra_checks)
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ArithmeticError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
