"""Special functions: Legendre polynomials, incomplete gamma, chi-square.

Everything here is written from scratch on top of :mod:`math` and numpy so
the statistical code above it has no hidden dependency on a particular
special-function library. scipy is only used by the test-suite as an
independent reference.

Legendre polynomials use the standard normalization ``P_0(x) = 1``,
``P_1(x) = x`` together with Bonnet's three-term recursion. For ``x >= 1``
the polynomials are the dominant solution of that recursion, so upward
evaluation is stable and no backward pass is needed.
"""

import math

import numpy as np

from .exceptions import ConvergenceError, DomainError

__all__ = [
    "legendre_sequence",
    "legendre_ratios",
    "legendre_derivative",
    "rising_factorial",
    "upper_incomplete_gamma",
    "gamma_p",
    "gamma_q",
    "chi2_cdf",
    "chi2_sf",
    "chi2_pdf",
    "chi2_quantile",
]

_EPS = 2.220446049250313e-16
_GAMMA_MAX_ITER = 2000
_QUANTILE_MAX_ITER = 200


# --------------------------------------------------------------------------
# Legendre polynomials
# --------------------------------------------------------------------------


def _check_legendre_args(x, j_max):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Legendre argument must be finite")
    if np.any(x < 1.0):
        raise DomainError(f"Legendre argument must satisfy x >= 1, got min {x.min()}")
    if int(j_max) != j_max or j_max < 0:
        raise DomainError(f"j_max must be a non-negative integer, got {j_max}")
    return x, int(j_max)


def legendre_sequence(x, j_max):
    """Legendre polynomials ``P_0(x), ..., P_{j_max}(x)`` by upward recursion.

    Parameters
    ----------
    x : float or array_like
        Evaluation point(s), each finite and ``>= 1``.
    j_max : int
        Highest degree.

    Returns
    -------
    ndarray
        Shape ``(j_max + 1, *np.shape(x))``; row ``j`` holds ``P_j(x)``.

    Raises
    ------
    DomainError
        If any ``x < 1`` or is not finite, or ``j_max`` is negative.

    Notes
    -----
    ``P_j(x)`` grows like ``(x + sqrt(x^2 - 1))^j`` and overflows for large
    degrees at large ``x``; use :func:`legendre_ratios` there.
    """
    x, j_max = _check_legendre_args(x, j_max)
    out = np.empty((j_max + 1,) + x.shape)
    out[0] = 1.0
    if j_max >= 1:
        out[1] = x
    for j in range(1, j_max):
        out[j + 1] = ((2 * j + 1) * x * out[j] - j * out[j - 1]) / (j + 1)
    return out


def legendre_ratios(x, j_max):
    """Consecutive ratios ``P_j(x) / P_{j-1}(x)`` for ``j = 1, ..., j_max``.

    The ratios obey ``r_{j+1} = ((2j+1) x - j / r_j) / (j+1)``, Bonnet's
    recursion divided through by ``P_j``. They stay O(x) where the
    polynomials themselves would overflow.

    Returns
    -------
    ndarray
        Shape ``(j_max, *np.shape(x))``; row ``j - 1`` holds ``P_j / P_{j-1}``.
    """
    x, j_max = _check_legendre_args(x, j_max)
    out = np.empty((j_max,) + x.shape)
    if j_max == 0:
        return out
    out[0] = x
    for j in range(1, j_max):
        out[j] = ((2 * j + 1) * x - j / out[j - 1]) / (j + 1)
    return out


def legendre_derivative(x, j, pj, pjm1):
    """Derivative of ``P_j`` at ``x > 1`` from ``P_j(x)`` and ``P_{j-1}(x)``.

    Uses ``P_j'(x) = j (x P_j(x) - P_{j-1}(x)) / (x^2 - 1)``, which is
    singular at ``x = 1``; callers needing the endpoint must use
    ``P_j'(1) = j (j + 1) / 2`` themselves.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 1.0:
        raise DomainError(f"legendre_derivative needs x > 1, got {x}")
    if int(j) != j or j < 1:
        raise DomainError(f"degree must be an integer >= 1, got {j}")
    return j * (x * pj - pjm1) / (x * x - 1.0)


def rising_factorial(a, j):
    """Pochhammer symbol ``(a)_j = a (a + 1) ... (a + j - 1)``."""
    if int(j) != j or j < 0:
        raise DomainError(f"number of terms must be a non-negative integer, got {j}")
    value = 1.0
    for i in range(int(j)):
        value *= a + i
    return value


# --------------------------------------------------------------------------
# Incomplete gamma
# --------------------------------------------------------------------------


def _check_gamma_args(s, x):
    if not (s > 0.0) or not math.isfinite(s):
        raise DomainError(f"shape s must be positive and finite, got {s}")
    if not (x >= 0.0):
        raise DomainError(f"argument x must be >= 0, got {x}")


def _lower_series(s, x):
    """Sum in ``gamma(s, x) = x^s e^{-x} / s * sum_n x^n / ((s+1)...(s+n))``."""
    term = 1.0 / s
    total = term
    for n in range(1, _GAMMA_MAX_ITER):
        term *= x / (s + n)
        total += term
        if abs(term) < abs(total) * _EPS:
            return total
    raise ConvergenceError(f"incomplete gamma series did not converge (s={s}, x={x})")


def _upper_continued_fraction(s, x):
    """Continued fraction for ``Gamma(s, x) e^x x^{-s}`` (modified Lentz)."""
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ConvergenceError(f"incomplete gamma continued fraction did not converge (s={s}, x={x})")


def _log_prefactor(s, x):
    return s * math.log(x) - x


def _gamma_q_scalar(s, x):
    _check_gamma_args(s, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        p = math.exp(_log_prefactor(s, x) - math.lgamma(s)) * _lower_series(s, x)
        return 1.0 - p
    return math.exp(_log_prefactor(s, x) - math.lgamma(s)) * _upper_continued_fraction(s, x)


def _gamma_p_scalar(s, x):
    _check_gamma_args(s, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < s + 1.0:
        return math.exp(_log_prefactor(s, x) - math.lgamma(s)) * _lower_series(s, x)
    q = math.exp(_log_prefactor(s, x) - math.lgamma(s)) * _upper_continued_fraction(s, x)
    return 1.0 - q


def _upper_gamma_scalar(s, x):
    _check_gamma_args(s, x)
    if x == 0.0:
        return math.gamma(s)
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        return math.gamma(s) - math.exp(_log_prefactor(s, x)) * _lower_series(s, x)
    return math.exp(_log_prefactor(s, x)) * _upper_continued_fraction(s, x)


def _elementwise(func, *args):
    if all(np.ndim(a) == 0 for a in args):
        return func(*(float(a) for a in args))
    bcast = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))
    out = np.empty(bcast[0].shape)
    for idx in np.ndindex(out.shape):
        out[idx] = func(*(float(b[idx]) for b in bcast))
    return out


def upper_incomplete_gamma(s, x):
    """Upper incomplete gamma ``Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt``.

    Series expansion of the lower function for ``x < s + 1``, continued
    fraction otherwise. Accepts scalars or broadcastable arrays.

    Raises
    ------
    DomainError
        For ``s <= 0`` or ``x < 0``.
    """
    return _elementwise(_upper_gamma_scalar, s, x)


def gamma_p(s, x):
    """Regularized lower incomplete gamma ``P(s, x) = gamma(s, x) / Gamma(s)``."""
    return _elementwise(_gamma_p_scalar, s, x)


def gamma_q(s, x):
    """Regularized upper incomplete gamma ``Q(s, x) = Gamma(s, x) / Gamma(s)``."""
    return _elementwise(_gamma_q_scalar, s, x)


# --------------------------------------------------------------------------
# Chi-square distribution
# --------------------------------------------------------------------------


def _check_df(df):
    if not (df > 0.0) or not math.isfinite(df):
        raise DomainError(f"degrees of freedom must be positive and finite, got {df}")


def _chi2_cdf_scalar(df, x):
    _check_df(df)
    if x < 0.0:
        raise DomainError(f"chi-square argument must be >= 0, got {x}")
    return _gamma_p_scalar(0.5 * df, 0.5 * x)


def _chi2_sf_scalar(df, x):
    _check_df(df)
    if x < 0.0:
        raise DomainError(f"chi-square argument must be >= 0, got {x}")
    return _gamma_q_scalar(0.5 * df, 0.5 * x)


def _chi2_pdf_scalar(df, x):
    _check_df(df)
    if x < 0.0:
        raise DomainError(f"chi-square argument must be >= 0, got {x}")
    k = 0.5 * df
    if x == 0.0:
        if k < 1.0:
            return math.inf
        return 0.5 if k == 1.0 else 0.0
    return math.exp((k - 1.0) * math.log(x) - 0.5 * x - k * math.log(2.0) - math.lgamma(k))


def chi2_cdf(df, x):
    """Chi-square distribution function, ``1 - Gamma(df/2, x/2) / Gamma(df/2)``."""
    return _elementwise(_chi2_cdf_scalar, df, x)


def chi2_sf(df, x):
    """Chi-square upper tail ``1 - chi2_cdf(df, x)`` without cancellation."""
    return _elementwise(_chi2_sf_scalar, df, x)


def chi2_pdf(df, x):
    """Chi-square density."""
    return _elementwise(_chi2_pdf_scalar, df, x)


def _chi2_quantile_scalar(df, q):
    _check_df(df)
    if not (0.0 < q < 1.0):
        raise DomainError(f"probability must lie in (0, 1), got {q}")

    # Solve on whichever tail keeps the target away from 1.
    upper = q > 0.5
    target = 1.0 - q if upper else q

    def resid(x):
        return (_chi2_sf_scalar(df, x) - target) if upper else (_chi2_cdf_scalar(df, x) - target)

    sign = -1.0 if upper else 1.0  # d resid / dx has this sign
    lo, hi = 0.0, max(1.0, df)
    while sign * resid(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ConvergenceError(f"could not bracket chi-square quantile (df={df}, q={q})")

    x = 0.5 * (lo + hi)
    for _ in range(_QUANTILE_MAX_ITER):
        r = resid(x)
        if abs(r) <= 1e-14 * max(target, 1e-300) or hi - lo <= 4 * _EPS * hi:
            return x
        if sign * r < 0.0:
            lo = x
        else:
            hi = x
        dens = _chi2_pdf_scalar(df, x)
        step = r / (sign * dens) if dens > 0.0 and math.isfinite(dens) else math.nan
        candidate = x - step
        # Fall back to bisection when Newton leaves the bracket.
        x = candidate if lo < candidate < hi else 0.5 * (lo + hi)
    r = resid(x)
    if abs(r) <= 1e-10:
        return x
    raise ConvergenceError(f"chi-square quantile did not converge (df={df}, q={q})")


def chi2_quantile(df, q):
    """Chi-square quantile: ``x`` such that ``chi2_cdf(df, x) == q``.

    Bracketing bisection safeguarded with Newton steps, capped at 200
    iterations.

    Raises
    ------
    DomainError
        If ``q`` is not in the open interval (0, 1).
    ConvergenceError
        If the iteration cap is reached.
    """
    return _elementwise(_chi2_quantile_scalar, df, q)
