"""Eigenvalue distribution of a 2x2 (non-)central Wishart matrix.

``S = (X Y)^T (X Y)`` with ``X ~ N(mu_1, I_p)``, ``Y ~ N(beta mu_1, I_p)``
is Wishart with ``p`` degrees of freedom, identity scale and a rank-one
noncentrality whose only nonzero eigenvalue is
``kappa = (1 + beta^2) |mu_1|^2``. The ordered eigenvalues
``lambda1 > lambda2 > 0`` have joint density proportional to

    0F1(p/2; diag(kappa/4, 0), diag(lambda1, lambda2))
        * exp(-(lambda1 + lambda2)/2) (lambda1 lambda2)^((p-3)/2) (lambda1 - lambda2)

where the hypergeometric function of two matrix arguments reduces to a
Legendre series (see :func:`hyp0f1_series`). Marginals and distribution
functions of ``lambda2`` are obtained by adaptive quadrature; normalizing
constants are computed numerically once per ``(p, kappa)`` and cached.
"""

import math
import threading
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .exceptions import ConvergenceError, DomainError
from .specfun import upper_incomplete_gamma

__all__ = [
    "NoncentralSpec",
    "SeriesControl",
    "QuadratureControl",
    "central_joint_density_unnorm",
    "g_central",
    "central_marginal_density_unnorm",
    "central_marginal_density",
    "hyp0f1_series",
    "noncentral_joint_density_unnorm",
    "likelihood_ratio_unnorm",
    "noncentral_marginal_density_unnorm",
    "normalizing_constant",
    "noncentral_marginal_density",
    "lambda2_cdf",
    "lambda2_sf",
    "lambda2_mean",
]


@dataclass(frozen=True)
class NoncentralSpec:
    """Dimension ``p >= 2`` and noncentrality ``kappa >= 0``."""

    p: int
    kappa: float = 0.0

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 2:
            raise DomainError(f"p must be an integer >= 2, got {self.p}")
        if not (self.kappa >= 0.0) or not math.isfinite(self.kappa):
            raise DomainError(f"kappa must be finite and >= 0, got {self.kappa}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "kappa", float(self.kappa))

    @property
    def central(self) -> bool:
        return self.kappa == 0.0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation of the Legendre series.

    Summation stops once three consecutive terms fall below
    ``rel_tol`` times the partial sum; reaching ``j_max`` first is an error.
    """

    rel_tol: float = 1e-12
    j_max: int = 500

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-6):
            raise DomainError(f"rel_tol must lie in (0, 1e-6], got {self.rel_tol}")
        if self.j_max < 10:
            raise DomainError(f"j_max must be at least 10, got {self.j_max}")


@dataclass(frozen=True)
class QuadratureControl:
    """Adaptive quadrature settings.

    Attributes
    ----------
    abs_tol : float
        Target absolute accuracy of normalized probabilities.
    rel_tol : float
        Relative accuracy requested from each inner integral over
        ``lambda1``; the likelihood-ratio checks compare values that decay
        like ``exp(-lambda2/2)``, so these need relative, not absolute,
        control.
    max_subdivisions : int
        Subinterval limit passed to QUADPACK.
    tail_factor : float
        A semi-infinite integral is truncated at the first doubling point
        ``T`` where the integrand has decayed (and is still decaying) below
        ``tail_factor * rel_tol`` times the accumulated integral. The
        integrands carry an ``exp(-t/2)`` envelope, so the neglected tail is
        at most a small multiple of that.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    tail_factor: float = 1e-3

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be positive")


DEFAULT_SERIES = SeriesControl()
DEFAULT_QUAD = QuadratureControl()


# --------------------------------------------------------------------------
# Central case in closed form
# --------------------------------------------------------------------------


def central_joint_density_unnorm(p, lambda1, lambda2):
    """``exp(-(l1 + l2)/2) (l1 l2)^((p-3)/2) (l1 - l2)`` for ``l1 > l2 > 0``.

    Returns 0 on the diagonal ``l1 == l2`` and outside the ordered region.
    """
    if lambda1 < 0.0 or lambda2 < 0.0:
        raise DomainError("eigenvalues must be non-negative")
    if lambda1 <= lambda2:
        return 0.0
    e = 0.5 * (p - 3)
    return math.exp(-0.5 * (lambda1 + lambda2)) * (lambda1 * lambda2) ** e * (lambda1 - lambda2)


def g_central(p, lambda2):
    """Central likelihood ratio of ``lambda2`` against chi-square(p - 1).

    ``Gamma((p+1)/2, l/2) - (l/2) Gamma((p-1)/2, l/2)``, a strictly
    decreasing function whose derivative is ``-Gamma((p-1)/2, l/2)``.
    """
    if lambda2 < 0.0:
        raise DomainError(f"lambda2 must be >= 0, got {lambda2}")
    h = 0.5 * lambda2
    return upper_incomplete_gamma(0.5 * (p + 1), h) - h * upper_incomplete_gamma(0.5 * (p - 1), h)


def central_marginal_density_unnorm(p, lambda2):
    """``exp(-l/2) l^((p-3)/2) g_central(p, l)``.

    Equal to ``2^(-(p+1)/2)`` times the integral of
    :func:`central_joint_density_unnorm` over ``lambda1 > lambda2``.
    """
    if lambda2 <= 0.0:
        raise DomainError(f"lambda2 must be > 0, got {lambda2}")
    return math.exp(-0.5 * lambda2) * lambda2 ** (0.5 * (p - 3)) * g_central(p, lambda2)


_cache_lock = threading.RLock()
_central_norms: dict = {}
_noncentral_norms: dict = {}


def _central_norm(p):
    with _cache_lock:
        if p not in _central_norms:
            # lambda2 = u^2 removes the l^(-1/2) singularity at p = 2.
            def f(u):
                return 2.0 * u * central_marginal_density_unnorm(p, u * u) if u > 0 else (
                    2.0 * g_central(p, 0.0) if p == 2 else 0.0
                )

            value, _ = integrate.quad(f, 0.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)
            _central_norms[p] = value
        return _central_norms[p]


def central_marginal_density(p, lambda2):
    """Normalized density of ``lambda2`` in the central case."""
    return central_marginal_density_unnorm(p, lambda2) / _central_norm(p)


# --------------------------------------------------------------------------
# Legendre series for 0F1 of two matrix arguments
# --------------------------------------------------------------------------


def _series_scaled(p, kappa, lambda1, lambda2, rel_tol, j_max):
    """Sum of ``c^j Q_j / (j! (p/2)_j)`` with ``c = kappa/4``.

    ``Q_j = (l1 l2)^(j/2) P_j((l1 + l2) / (2 sqrt(l1 l2)))`` is generated by
    Bonnet's recursion multiplied through by ``(l1 l2)^((j+1)/2)``:

        (j+1) Q_{j+1} = (2j+1) s Q_j - j d Q_{j-1},  s = (l1+l2)/2, d = l1 l2,

    which is polynomial in the eigenvalues and cannot overflow at small
    ``l2`` the way ``P_j`` of a huge argument would. The coefficient
    ``c^j / (j! (p/2)_j)`` is folded into the recursion.
    """
    if kappa == 0.0:
        return 1.0
    c = 0.25 * kappa
    a = 0.5 * p
    s = 0.5 * (lambda1 + lambda2)
    d = lambda1 * lambda2
    prev = 1.0
    cur = c * s / a
    total = prev + cur
    small = 1 if cur <= rel_tol * total else 0
    for j in range(1, j_max):
        nxt = c / ((j + 1) * (j + 1) * (a + j)) * ((2 * j + 1) * s * cur - c * d * prev / (a + j - 1))
        total += nxt
        if nxt <= rel_tol * total:
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
        prev, cur = cur, nxt
    raise ConvergenceError(
        f"0F1 series not converged after {j_max} terms (p={p}, kappa={kappa}, "
        f"lambda1={lambda1}, lambda2={lambda2})"
    )


def hyp0f1_series(spec, lambda1, lambda2, ctl=DEFAULT_SERIES):
    """``0F1(p/2; diag(kappa/4, 0), diag(lambda1, lambda2))`` as a Legendre series.

    .. math::

        \\sum_{j \\ge 0} \\frac{\\kappa^j (\\lambda_1 \\lambda_2)^{j/2}}
        {4^j (p/2)_j\\, j!} P_j\\left(\\frac{\\lambda_1 + \\lambda_2}
        {2 \\sqrt{\\lambda_1 \\lambda_2}}\\right)

    Every term is non-negative, so the value is at least 1 and exactly 1
    when ``kappa == 0``. ``lambda2 == 0`` is accepted as the limit.

    Raises
    ------
    ConvergenceError
        If ``ctl.j_max`` terms do not reach ``ctl.rel_tol``.
    """
    if lambda2 < 0.0 or lambda1 < lambda2:
        raise DomainError(f"need lambda1 >= lambda2 >= 0, got ({lambda1}, {lambda2})")
    return _series_scaled(spec.p, spec.kappa, float(lambda1), float(lambda2), ctl.rel_tol, ctl.j_max)


def noncentral_joint_density_unnorm(spec, lambda1, lambda2, ctl=DEFAULT_SERIES):
    """Unnormalized joint density of the ordered eigenvalues.

    Integrates to ``2^p Gamma(p/2) Gamma((p-1)/2) exp(kappa/2) / sqrt(pi)``
    over ``lambda1 > lambda2 > 0``.
    """
    base = central_joint_density_unnorm(spec.p, lambda1, lambda2)
    if base == 0.0 or spec.central:
        return base
    return base * hyp0f1_series(spec, lambda1, lambda2, ctl)


# --------------------------------------------------------------------------
# Marginal of lambda2
# --------------------------------------------------------------------------


def _quad(f, a, b, quad_ctl, what):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, err = integrate.quad(
            f, a, b, epsabs=0.0, epsrel=quad_ctl.rel_tol, limit=quad_ctl.max_subdivisions
        )
    # QUADPACK warns when roundoff stops it short of a very tight epsrel;
    # only a large reported error is a genuine failure.
    if caught and err > 1e3 * quad_ctl.rel_tol * abs(value) + 1e-300:
        raise ConvergenceError(f"quadrature failed for {what} on [{a}, {b}]: error estimate {err}")
    return value


def _semi_infinite(f, start_width, quad_ctl, what):
    """Integrate ``f`` over ``[0, inf)`` by doubling the truncation point."""
    total = _quad(f, 0.0, start_width, quad_ctl, what)
    lo, hi = 0.0, start_width
    for _ in range(60):
        f_hi = f(hi)
        if f_hi <= quad_ctl.tail_factor * quad_ctl.rel_tol * abs(total) and f_hi <= f(0.5 * (lo + hi)):
            return total
        lo, hi = hi, 2.0 * hi
        total += _quad(f, lo, hi, quad_ctl, what)
    raise ConvergenceError(f"tail of {what} did not decay")


def _start_width(spec):
    return 40.0 + 2.0 * spec.p + 4.0 * spec.kappa


def likelihood_ratio_unnorm(spec, lambda2, series_ctl=DEFAULT_SERIES, quad_ctl=DEFAULT_QUAD):
    """Unnormalized ratio of the ``lambda2`` density to the chi-square(p-1) kernel.

    .. math::

        H(\\lambda_2) = \\int_{\\lambda_2}^\\infty e^{-\\lambda_1/2}
        \\lambda_1^{(p-3)/2} (\\lambda_1 - \\lambda_2)\\,
        {}_0F_1(\\ldots)\\, d\\lambda_1

    The marginal density is ``exp(-l2/2) l2^((p-3)/2) H(l2)`` up to a
    constant. In the central case ``H = 2^((p+1)/2) g_central``.
    """
    if lambda2 < 0.0:
        raise DomainError(f"lambda2 must be >= 0, got {lambda2}")
    p, kappa = spec.p, spec.kappa
    e = 0.5 * (p - 3)
    rel, jmax = series_ctl.rel_tol, series_ctl.j_max
    l2 = float(lambda2)

    def integrand(t):
        l1 = l2 + t
        if l1 == 0.0:
            return 0.0
        return math.exp(-0.5 * t) * l1**e * t * _series_scaled(p, kappa, l1, l2, rel, jmax)

    inner = _semi_infinite(integrand, _start_width(spec), quad_ctl, "likelihood ratio")
    return math.exp(-0.5 * l2) * inner


def noncentral_marginal_density_unnorm(spec, lambda2, series_ctl=DEFAULT_SERIES, quad_ctl=DEFAULT_QUAD):
    """Integral of :func:`noncentral_joint_density_unnorm` over ``lambda1 > lambda2``."""
    if lambda2 <= 0.0:
        raise DomainError(f"lambda2 must be > 0, got {lambda2}")
    h = likelihood_ratio_unnorm(spec, lambda2, series_ctl, quad_ctl)
    return math.exp(-0.5 * lambda2) * lambda2 ** (0.5 * (spec.p - 3)) * h


def _root_integrand(spec, series_ctl, quad_ctl):
    """Marginal density in ``u = sqrt(lambda2)``: ``2 u f(u^2)``.

    Equals ``2 exp(-u^2/2) u^(p-2) H(u^2)``, finite at ``u = 0`` for p = 2.
    """
    p = spec.p

    def f(u):
        if u == 0.0:
            return 2.0 * likelihood_ratio_unnorm(spec, 0.0, series_ctl, quad_ctl) if p == 2 else 0.0
        return 2.0 * math.exp(-0.5 * u * u) * u ** (p - 2) * likelihood_ratio_unnorm(
            spec, u * u, series_ctl, quad_ctl
        )

    return f


def normalizing_constant(spec, series_ctl=DEFAULT_SERIES, quad_ctl=DEFAULT_QUAD):
    """Total mass of the unnormalized joint density, by nested quadrature.

    Computed once per ``(spec, controls)`` and cached; concurrent first
    calls serialize on a lock and all see the same value.
    """
    key = (spec, series_ctl, quad_ctl)
    with _cache_lock:
        if key not in _noncentral_norms:
            f = _root_integrand(spec, series_ctl, quad_ctl)
            width = math.sqrt(_start_width(spec))
            _noncentral_norms[key] = _semi_infinite(f, width, quad_ctl, "normalizing constant")
        return _noncentral_norms[key]


def noncentral_marginal_density(spec, lambda2, series_ctl=DEFAULT_SERIES, quad_ctl=DEFAULT_QUAD):
    """Normalized density of ``lambda2``.

    At ``lambda2 = 0`` the limit is returned: ``inf`` for ``p = 2``, finite
    for ``p = 3`` and 0 for ``p > 3``.
    """
    if lambda2 < 0.0:
        raise DomainError(f"lambda2 must be >= 0, got {lambda2}")
    z = normalizing_constant(spec, series_ctl, quad_ctl)
    if lambda2 == 0.0:
        if spec.p == 2:
            return math.inf
        if spec.p == 3:
            return likelihood_ratio_unnorm(spec, 0.0, series_ctl, quad_ctl) / z
        return 0.0
    return noncentral_marginal_density_unnorm(spec, lambda2, series_ctl, quad_ctl) / z


def lambda2_cdf(spec, x, series_ctl=DEFAULT_SERIES, quad_ctl=DEFAULT_QUAD):
    """Distribution function of ``lambda2`` at ``x`` (scalar or array).

    Arrays are evaluated by integrating between consecutive sorted points
    and accumulating, so a grid costs about as much as its last point.
    """
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0.0) or np.any(np.isnan(xs)):
        raise DomainError("cdf argument must be >= 0")
    flat = xs.ravel()
    order = np.argsort(flat)
    f = _root_integrand(spec, series_ctl, quad_ctl)
    z = normalizing_constant(spec, series_ctl, quad_ctl)
    out = np.empty_like(flat)
    acc, u_prev = 0.0, 0.0
    for i in order:
        u = math.sqrt(flat[i])
        if math.isinf(u):
            out[i] = 1.0
            continue
        if u > u_prev:
            acc += _quad(f, u_prev, u, quad_ctl, "cdf")
            u_prev = u
        out[i] = acc / z
    out = np.clip(out, 0.0, 1.0).reshape(xs.shape)
    return float(out) if out.ndim == 0 else out


def lambda2_sf(spec, x, series_ctl=DEFAULT_SERIES, quad_ctl=DEFAULT_QUAD):
    """Upper tail ``P(lambda2 > x)``, integrated directly over ``(x, inf)``."""
    if x < 0.0:
        raise DomainError("sf argument must be >= 0")
    f = _root_integrand(spec, series_ctl, quad_ctl)
    u0 = math.sqrt(x)
    tail = _semi_infinite(lambda v: f(u0 + v), math.sqrt(_start_width(spec)), quad_ctl, "sf")
    return min(max(tail / normalizing_constant(spec, series_ctl, quad_ctl), 0.0), 1.0)


def lambda2_mean(spec, series_ctl=DEFAULT_SERIES, quad_ctl=DEFAULT_QUAD):
    """Expected value of ``lambda2``."""
    f = _root_integrand(spec, series_ctl, quad_ctl)
    width = math.sqrt(_start_width(spec))
    first = _semi_infinite(lambda u: u * u * f(u), width, quad_ctl, "mean")
    return first / normalizing_constant(spec, series_ctl, quad_ctl)
