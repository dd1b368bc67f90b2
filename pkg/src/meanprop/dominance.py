"""Numerical verification of the inequalities behind the dominance theorem.

Each ``check_*`` function evaluates one inequality on a grid and returns a
:class:`VerificationReport`. A non-strict inequality ``lhs <= rhs`` counts
as violated only when ``lhs > rhs + slack * max(1, |rhs|)``.

Legendre quantities are evaluated through the ratios
``P_j(x) / P_{j-1}(x)`` (:func:`~meanprop.specfun.legendre_ratios`) because
``P_200(1000)`` overflows a double.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import legendre_ratios, legendre_sequence, upper_incomplete_gamma
from .wishart import (
    DEFAULT_QUAD,
    DEFAULT_SERIES,
    NoncentralSpec,
    g_central,
    likelihood_ratio_unnorm,
)

__all__ = [
    "VerificationReport",
    "default_x_grid",
    "default_lambda_grid",
    "check_key_inequality",
    "check_induction_target",
    "check_degree_monotonicity",
    "check_ratio_lower_bound",
    "check_gc_derivative",
    "check_mlr_noncentral",
    "check_integrand_monotonicity",
    "run_all_checks",
    "DEFAULT_MLR_SPECS",
]

SLACK = 1e-9
MAX_LISTED_VIOLATIONS = 50

#: The nine ``(p, kappa)`` pairs whose likelihood ratios are checked by default.
DEFAULT_MLR_SPECS = tuple(NoncentralSpec(p, k) for p in (2, 5, 10) for k in (0.0, 5.0, 20.0))


@dataclass
class VerificationReport:
    """Outcome of one grid check.

    ``violations`` holds at most :data:`MAX_LISTED_VIOLATIONS` entries
    ``(point, lhs, rhs, margin)`` with ``margin = rhs - lhs``;
    ``n_violations`` is the full count. ``worst_margin`` is the smallest
    margin seen over the whole grid.
    """

    check_name: str
    grid_description: str
    violations: list = field(default_factory=list)
    worst_margin: float = math.inf
    n_checked: int = 0
    n_violations: int = 0

    @property
    def passed(self) -> bool:
        return self.n_violations == 0

    def asdict(self) -> dict:
        return {
            "check_name": self.check_name,
            "grid_description": self.grid_description,
            "violations": [
                {"point": pt, "lhs": lhs, "rhs": rhs, "margin": m} for pt, lhs, rhs, m in self.violations
            ],
            "worst_margin": self.worst_margin,
            "passed": self.passed,
            "n_checked": self.n_checked,
            "n_violations": self.n_violations,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.asdict(), **kwargs)


def _record(report, points, lhs, rhs, slack=SLACK):
    """Fold arrays of ``lhs <= rhs`` comparisons into ``report`` in grid order."""
    lhs = np.asarray(lhs, dtype=float).ravel()
    rhs = np.asarray(rhs, dtype=float).ravel()
    margin = rhs - lhs
    report.n_checked += margin.size
    if margin.size:
        report.worst_margin = min(report.worst_margin, float(np.min(margin)))
    bad = np.flatnonzero(~(lhs <= rhs + slack * np.maximum(1.0, np.abs(rhs))))
    report.n_violations += bad.size
    room = MAX_LISTED_VIOLATIONS - len(report.violations)
    for i in bad[: max(room, 0)]:
        report.violations.append((points[i], float(lhs[i]), float(rhs[i]), float(margin[i])))
    return report


def default_x_grid(n=2000, upper=1e3):
    """``n`` points log-spaced in ``x - 1`` over ``(1 + 1e-8, upper]``."""
    return 1.0 + np.logspace(-8, math.log10(upper - 1.0), n)


def default_lambda_grid(n=500, upper=60.0):
    return np.linspace(1e-6, upper, n)


def _describe(name, grid):
    grid = np.asarray(grid, dtype=float)
    return f"{name}: {grid.size} points in [{grid.min():.6g}, {grid.max():.6g}]"


def _inv_root_gap(x):
    """``x - sqrt(x^2 - 1)`` computed as ``1 / (x + sqrt(x^2 - 1))``."""
    return 1.0 / (x + np.sqrt((x - 1.0) * (x + 1.0)))


class _LazyPoints:
    """Index-on-demand list of ``{"j", "x"}`` grid points."""

    def __init__(self, js, xs):
        self.js = js.ravel()
        self.xs = xs.ravel()

    def __getitem__(self, i):
        return {"j": int(self.js[i]), "x": float(self.xs[i])}


def check_key_inequality(j_max=200, x_grid=None):
    """``P_{j-1}(x) / P_j(x) <= (j+1)/j * (x - sqrt(x^2 - 1))`` for ``1 <= j <= j_max``."""
    x = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    if np.any(x <= 1.0):
        raise ValueError("key inequality grid points must exceed 1")
    ratios = legendre_ratios(x, j_max)  # row j-1: P_j / P_{j-1}
    j = np.arange(1, j_max + 1)[:, None]
    lhs = 1.0 / ratios
    rhs = (j + 1) / j * _inv_root_gap(x)[None, :]
    jj, xx = np.broadcast_arrays(j, x[None, :])
    report = VerificationReport(
        "key_inequality", f"j in [1, {j_max}]; " + _describe("x", x)
    )
    return _record(report, _LazyPoints(jj, xx), lhs, rhs)


def check_induction_target(j_max=200, x_grid=None):
    """``P_j(x) / P_{j+1}(x) <= (j+2)/(j+1) * (x - sqrt(x^2 - 1))`` for ``1 <= j < j_max``.

    This is the key inequality one degree up, tested in the form the
    induction step needs it, separately over the sub-threshold range
    ``x < (j+1) / sqrt(j (j+2))`` where the direct argument is used.
    """
    x = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    if np.any(x <= 1.0):
        raise ValueError("grid points must exceed 1")
    ratios = legendre_ratios(x, j_max)
    j = np.arange(1, j_max)[:, None]
    lhs = 1.0 / ratios[1:]  # P_j / P_{j+1}
    rhs = (j + 2) / (j + 1) * _inv_root_gap(x)[None, :]
    jj, xx = np.broadcast_arrays(j, x[None, :])
    report = VerificationReport(
        "induction_target", f"j in [1, {j_max - 1}]; " + _describe("x", x)
    )
    return _record(report, _LazyPoints(jj, xx), lhs, rhs)


def check_degree_monotonicity(j_max=200, x_grid=None):
    """``P_{j-1}(x) <= P_j(x)`` for ``x >= 1``, checked as ``1 <= P_j / P_{j-1}``.

    At ``x = 1`` every polynomial equals 1 and the check is an equality.
    """
    x = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    if np.any(x < 1.0):
        raise ValueError("grid points must be >= 1")
    ratios = legendre_ratios(x, j_max)
    j = np.arange(1, j_max + 1)[:, None]
    jj, xx = np.broadcast_arrays(j, x[None, :])
    report = VerificationReport("degree_monotonicity", f"j in [1, {j_max}]; " + _describe("x", x))
    return _record(report, _LazyPoints(jj, xx), np.ones_like(ratios), ratios)


def check_ratio_lower_bound(j_max=200, x_grid=None, restricted=True):
    """``P_{j+1}(x) / P_j(x) >= x``.

    With ``restricted=True`` only pairs with ``1 < x < (j+1)/sqrt(j(j+2))``
    (the range where the direct argument replaces induction) are checked;
    otherwise every grid point is.
    """
    x = default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    if np.any(x <= 1.0):
        raise ValueError("grid points must exceed 1")
    ratios = legendre_ratios(x, j_max)
    j = np.arange(1, j_max)[:, None]
    lhs = np.broadcast_to(x[None, :], (j_max - 1, x.size))
    rhs = ratios[1:]  # P_{j+1} / P_j
    jj, xx = np.broadcast_arrays(j, x[None, :])
    if restricted:
        mask = xx < (jj + 1) / np.sqrt(jj * (jj + 2.0))
        name, scope = "ratio_lower_bound", "x < (j+1)/sqrt(j(j+2)); "
    else:
        mask = np.ones(xx.shape, dtype=bool)
        name, scope = "ratio_lower_bound_full_grid", ""
    report = VerificationReport(name, f"j in [1, {j_max - 1}]; {scope}" + _describe("x", x))
    return _record(report, _LazyPoints(jj[mask], xx[mask]), lhs[mask], rhs[mask])


def _fd_step(lam):
    return min(1e-4 * max(1.0, lam), 0.1 * lam)


def check_gc_derivative(p_list=tuple(range(2, 21)), lambda_grid=None, tol=1e-5):
    """Derivative of :func:`~meanprop.wishart.g_central` in ``h = l/2`` equals ``-Gamma((p-1)/2, h)``.

    With respect to ``lambda2`` itself the derivative is half that,
    ``-Gamma((p-1)/2, l/2) / 2``; either way it is negative. The derivative
    is a central difference, compared at relative
    tolerance ``tol`` (``g_central`` is of order ``Gamma((p+1)/2)``, about
    1e6 at p = 20, so an absolute bound would be meaningless there). A
    second pass requires ``g_central`` to be strictly decreasing along
    the grid.
    """
    lam = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    report = VerificationReport(
        "gc_derivative", f"p in {list(p_list)}; " + _describe("lambda2", lam)
    )
    for p in p_list:
        points, fd_err, bound = [], [], []
        values = np.empty(lam.size)
        for i, l in enumerate(lam):
            h = _fd_step(l)
            fd = (g_central(p, l + h) - g_central(p, l - h)) / h  # d/d(l/2)
            exact = -upper_incomplete_gamma(0.5 * (p - 1), 0.5 * l)
            points.append({"p": p, "lambda2": float(l), "what": "derivative"})
            fd_err.append(abs(fd - exact))
            bound.append(tol * max(1.0, abs(exact)))
            values[i] = g_central(p, l)
        _record(report, points, fd_err, bound, slack=0.0)
        # strict decrease: g[i+1] < g[i]
        mono_points = [{"p": p, "lambda2": float(l), "what": "decreasing"} for l in lam[1:]]
        lhs, rhs = values[1:], values[:-1]
        strict = lhs < rhs
        report.n_checked += strict.size
        report.worst_margin = min(report.worst_margin, float(np.min(rhs - lhs)))
        for i in np.flatnonzero(~strict):
            report.n_violations += 1
            if len(report.violations) < MAX_LISTED_VIOLATIONS:
                report.violations.append((mono_points[i], float(lhs[i]), float(rhs[i]), float(rhs[i] - lhs[i])))
    return report


def check_mlr_noncentral(spec, lambda_grid=None, series_ctl=DEFAULT_SERIES, quad_ctl=DEFAULT_QUAD):
    """Ratio of the ``lambda2`` density to the chi-square(p-1) kernel is non-increasing.

    The ratio (up to a constant) is
    :func:`~meanprop.wishart.likelihood_ratio_unnorm`; consecutive grid
    values must satisfy ``H[i+1] <= H[i] (1 + 1e-9)``. The slack is
    relative because ``H`` decays like ``exp(-lambda2/2)``.
    """
    lam = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    h = np.array([likelihood_ratio_unnorm(spec, float(l), series_ctl, quad_ctl) for l in lam])
    report = VerificationReport(
        f"mlr_noncentral(p={spec.p}, kappa={spec.kappa:g})", _describe("lambda2", lam)
    )
    points = [{"p": spec.p, "kappa": spec.kappa, "lambda2": float(l)} for l in lam[1:]]
    lhs, rhs = h[1:], h[:-1]
    report.n_checked = lhs.size
    scale = np.abs(rhs)
    margin = (rhs - lhs) / np.where(scale > 0, scale, 1.0)
    report.worst_margin = float(np.min(margin)) if margin.size else math.inf
    bad = np.flatnonzero(lhs > rhs * (1.0 + SLACK))
    report.n_violations = bad.size
    for i in bad[:MAX_LISTED_VIOLATIONS]:
        report.violations.append((points[i], float(lhs[i]), float(rhs[i]), float(margin[i])))
    return report


def _integrand_term(lam1, lam2, j):
    """``(l1 - l2) l2^(j/2) P_j((l1 + l2) / (2 sqrt(l1 l2)))``."""
    x = (lam1 + lam2) / (2.0 * math.sqrt(lam1 * lam2))
    pj = legendre_sequence(x, j)[j]
    return (lam1 - lam2) * lam2 ** (0.5 * j) * pj


def check_integrand_monotonicity(n=500, seed=0, j_max=30):
    """Finite-difference check that each series term decreases in ``lambda2``.

    For random ``lambda1 > lambda2 > 0`` and ``0 <= j <= j_max``, the
    central difference of :func:`_integrand_term` in ``lambda2`` must be
    non-positive (relative slack 1e-6 to absorb differencing error).
    """
    rng = np.random.default_rng(seed)
    report = VerificationReport(
        "integrand_monotonicity", f"{n} random (lambda1, lambda2, j), j <= {j_max}, seed {seed}"
    )
    pts, lhs, rhs = [], [], []
    for _ in range(n):
        lam2 = float(rng.uniform(0.05, 20.0))
        lam1 = lam2 * float(1.0 + rng.exponential(2.0)) + 1e-3
        j = int(rng.integers(0, j_max + 1))
        h = 1e-6 * lam2
        lo = _integrand_term(lam1, lam2 - h, j)
        hi = _integrand_term(lam1, lam2 + h, j)
        deriv = (hi - lo) / (2.0 * h)
        scale = max(abs(lo), abs(hi)) / lam2
        pts.append({"lambda1": lam1, "lambda2": lam2, "j": j})
        lhs.append(deriv)
        rhs.append(1e-6 * scale)
    return _record(report, pts, lhs, rhs, slack=0.0)


def run_all_checks(j_max=200, mlr_specs=DEFAULT_MLR_SPECS, mlr_grid=None, extra_checks=()):
    """Run every check on default grids; returns a list of reports in fixed order.

    ``extra_checks`` is a sequence of zero-argument callables returning
    reports, appended last (used to exercise failure handling).
    """
    reports = [
        check_key_inequality(j_max),
        check_induction_target(j_max),
        check_degree_monotonicity(j_max),
        check_ratio_lower_bound(j_max, restricted=True),
        check_ratio_lower_bound(j_max, restricted=False),
        check_gc_derivative(),
        check_integrand_monotonicity(),
    ]
    reports += [check_mlr_noncentral(spec, mlr_grid) for spec in mlr_specs]
    reports += [check() for check in extra_checks]
    return reports


def aggregate(reports) -> dict:
    """Combined JSON-ready summary of several reports."""
    return {
        "passed": all(r.passed for r in reports),
        "checks": [r.asdict() for r in reports],
    }
