"""The likelihood-ratio chi-square test for proportional means.

Given independent ``X ~ N(mu_1, I_p)`` and ``Y ~ N(mu_2, I_p)`` the pivot

    R(beta) = |Y - beta X|^2 / (1 + beta^2)

is chi-square with ``p`` degrees of freedom at the true slope when
``mu_2 = beta mu_1``. Its infimum over ``beta`` is the smallest eigenvalue of
the 2x2 Gram matrix ``S = (X Y)^T (X Y)``; that infimum is the test statistic
and it is compared against chi-square with ``p - 1`` degrees of freedom.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from .exceptions import DimensionError, DomainError
from .specfun import chi2_quantile, chi2_sf

__all__ = [
    "INFINITE_SLOPE",
    "Sample",
    "GramMatrix",
    "EigenPair",
    "TestOutcome",
    "FiellerInterval",
    "gram",
    "whiten",
    "pivot",
    "eigen2",
    "smallest_eigenvalue",
    "minimize_pivot",
    "proportionality_test",
    "fieller_interval",
]

#: Slope reported when the minimizing direction is ``(1, 0)``, i.e. ``beta -> inf``.
INFINITE_SLOPE = math.inf

_SYM_TOL = 1e-10
_EPS = 2.220446049250313e-16


@dataclass(frozen=True, eq=False)
class Sample:
    """Paired observation vectors with an optional known covariance.

    Parameters
    ----------
    x, y : array_like of shape (p,)
        Observations of ``X`` and ``Y``; ``p >= 2``.
    sigma : array_like of shape (p, p), optional
        Known common covariance. Must be symmetric positive definite.
    """

    x: np.ndarray
    y: np.ndarray
    sigma: Optional[np.ndarray] = None
    _chol: Optional[np.ndarray] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1:
            raise DimensionError(f"x and y must be vectors, got shapes {x.shape} and {y.shape}")
        if x.shape != y.shape:
            raise DimensionError(f"x and y must have equal length, got {x.size} and {y.size}")
        if x.size < 2:
            raise DimensionError(f"dimension p must be at least 2, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError("observations must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if self.sigma is not None:
            sigma = np.asarray(self.sigma, dtype=float)
            if sigma.shape != (x.size, x.size):
                raise DimensionError(f"sigma must be {x.size}x{x.size}, got shape {sigma.shape}")
            scale = max(1.0, float(np.max(np.abs(sigma))))
            if np.max(np.abs(sigma - sigma.T)) > _SYM_TOL * scale:
                raise DomainError("sigma must be symmetric")
            try:
                chol = linalg.cholesky(sigma, lower=True)
            except linalg.LinAlgError as exc:
                raise DomainError("sigma must be positive definite") from exc
            object.__setattr__(self, "sigma", sigma)
            object.__setattr__(self, "_chol", chol)

    @property
    def p(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class GramMatrix:
    """Entries of ``S = (X Y)^T (X Y)``."""

    sxx: float
    sxy: float
    syy: float

    @property
    def det(self) -> float:
        return self.sxx * self.syy - self.sxy * self.sxy

    @property
    def trace(self) -> float:
        return self.sxx + self.syy


@dataclass(frozen=True)
class EigenPair:
    """Ordered eigenvalues ``lambda1 >= lambda2 >= 0`` of a Gram matrix."""

    lambda1: float
    lambda2: float


@dataclass(frozen=True)
class TestOutcome:
    """Result of :func:`proportionality_test`.

    ``beta_hat`` is :data:`INFINITE_SLOPE` when the minimizing direction is
    vertical. ``reject`` refers to the level the test was run at.
    """

    __test__ = False  # not a pytest class

    statistic: float
    beta_hat: float
    df: int
    p_value: float
    reject: bool
    alpha: float

    def asdict(self) -> dict:
        """Report fields in their documented order."""
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "beta_hat": self.beta_hat,
            "reject": self.reject,
        }


@dataclass(frozen=True)
class FiellerInterval:
    """Confidence set for the slope obtained by inverting the pivot.

    ``kind`` is one of ``"bounded"`` (``[lower, upper]``),
    ``"complement"`` (``(-inf, lower] U [upper, inf)``; one endpoint may be
    infinite for a half-line), ``"all-reals"`` or ``"empty"``.
    """

    kind: str
    lower: float
    upper: float
    level: float

    def __contains__(self, beta) -> bool:
        if self.kind == "empty":
            return False
        if self.kind == "all-reals":
            return True
        if self.kind == "bounded":
            return self.lower <= beta <= self.upper
        return beta <= self.lower or beta >= self.upper

    def asdict(self) -> dict:
        return {"kind": self.kind, "lower": self.lower, "upper": self.upper, "level": self.level}


def gram(sample: Sample) -> GramMatrix:
    """Gram matrix of the raw (un-whitened) observations."""
    x, y = sample.x, sample.y
    return GramMatrix(float(x @ x), float(x @ y), float(y @ y))


def whiten(sample: Sample) -> Sample:
    """Remove a known covariance: ``x -> L^{-1} x``, ``y -> L^{-1} y``.

    ``L`` is the lower Cholesky factor of ``sigma``. Any square root of
    ``sigma^{-1}`` yields the same Gram matrix, so the statistic is the same
    as with the symmetric inverse square root. A sample without ``sigma`` is
    returned unchanged.
    """
    if sample.sigma is None:
        return sample
    xw = linalg.solve_triangular(sample._chol, sample.x, lower=True)
    yw = linalg.solve_triangular(sample._chol, sample.y, lower=True)
    return Sample(xw, yw)


def _as_gram(obj) -> GramMatrix:
    if isinstance(obj, GramMatrix):
        return obj
    return gram(whiten(obj))


def pivot(sample, beta: float) -> float:
    """Fieller pivot ``(Y - beta X)^T (Y - beta X) / (1 + beta^2)``.

    ``sample`` may be a :class:`Sample` (whitened first if it carries
    ``sigma``) or a :class:`GramMatrix`.
    """
    s = _as_gram(sample)
    beta = float(beta)
    if math.isinf(beta):
        return s.sxx
    value = (s.syy - 2.0 * beta * s.sxy + beta * beta * s.sxx) / (1.0 + beta * beta)
    return max(value, 0.0)


def smallest_eigenvalue(sxx, sxy, syy):
    """Vectorized ``lambda2`` of ``[[sxx, sxy], [sxy, syy]]``, clamped at 0."""
    sxx = np.asarray(sxx, dtype=float)
    syy = np.asarray(syy, dtype=float)
    half_trace = 0.5 * (sxx + syy)
    radius = np.hypot(0.5 * (sxx - syy), sxy)
    return np.maximum(half_trace - radius, 0.0)


def eigen2(s: GramMatrix) -> EigenPair:
    """Closed-form eigenvalues ``t +/- sqrt(t^2 - d)`` of a 2x2 Gram matrix.

    ``sqrt(t^2 - d)`` is evaluated as ``hypot((sxx - syy)/2, sxy)``, which is
    the same quantity without the cancellation in ``t^2 - d``.
    """
    half_trace = 0.5 * (s.sxx + s.syy)
    radius = math.hypot(0.5 * (s.sxx - s.syy), s.sxy)
    lam1 = half_trace + radius
    lam2 = max(half_trace - radius, 0.0)
    return EigenPair(lam1, lam2)


def minimize_pivot(s) -> tuple:
    """Minimize the pivot over all slopes.

    Writing the direction as ``c(theta) = (sin theta, -cos theta)`` the
    pivot becomes ``t + ((syy - sxx)/2) cos 2theta - sxy sin 2theta``, which
    is minimal at ``2 theta = atan2(sxy, (sxx - syy)/2)``. ``theta = pi/2``
    is the vertical direction and is reported as :data:`INFINITE_SLOPE`.

    Returns
    -------
    beta_hat : float
        Minimizing slope ``tan(theta)``.
    minimum : float
        ``lambda2(S)``.
    """
    s = _as_gram(s)
    theta = 0.5 * math.atan2(s.sxy, 0.5 * (s.sxx - s.syy))
    beta_hat = INFINITE_SLOPE if theta == 0.5 * math.pi else math.tan(theta)
    return beta_hat, eigen2(s).lambda2


def proportionality_test(sample: Sample, alpha: float = 0.05) -> TestOutcome:
    """Test ``H0: mu_2 = beta mu_1`` for some scalar ``beta``.

    The statistic ``min_beta R(beta) = lambda2(S)`` is referred to
    chi-square with ``p - 1`` degrees of freedom. The test is conservative
    for every ``p >= 2`` and every value of the nuisance parameters.

    Parameters
    ----------
    sample : Sample
        Observations; whitened first when ``sample.sigma`` is set.
    alpha : float
        Significance level in (0, 1).

    Returns
    -------
    TestOutcome
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    s = gram(whiten(sample))
    beta_hat, statistic = minimize_pivot(s)
    df = sample.p - 1
    p_value = float(chi2_sf(df, statistic))
    critical = float(chi2_quantile(df, 1.0 - alpha))
    return TestOutcome(
        statistic=statistic,
        beta_hat=beta_hat,
        df=df,
        p_value=p_value,
        reject=statistic > critical,
        alpha=alpha,
    )


def fieller_interval(sample: Sample, level: float = 0.95) -> FiellerInterval:
    """Fieller confidence set ``{beta : R(beta) <= chi2_p(level)}``.

    Solves ``beta^2 (sxx - q) - 2 beta sxy + (syy - q) <= 0``. The set is
    empty exactly when ``lambda2(S) > q``, i.e. when the data reject
    proportionality against the ``p``-degree-of-freedom quantile.
    """
    if not (0.0 < level < 1.0):
        raise DomainError(f"level must lie in (0, 1), got {level}")
    s = gram(whiten(sample))
    q = float(chi2_quantile(sample.p, level))
    a = s.sxx - q
    b = -2.0 * s.sxy
    c = s.syy - q
    disc = s.sxy * s.sxy - a * c  # quarter discriminant

    # |a| at rounding level: the quadratic has degenerated to a linear inequality
    if abs(a) <= 8 * _EPS * max(s.sxx, q):
        if b == 0.0:
            kind = "all-reals" if c <= 0.0 else "empty"
            return FiellerInterval(kind, math.nan, math.nan, level)
        root = -c / b
        if b > 0.0:
            return FiellerInterval("complement", root, math.inf, level)
        return FiellerInterval("complement", -math.inf, root, level)

    if disc < 0.0:
        kind = "empty" if a > 0.0 else "all-reals"
        return FiellerInterval(kind, math.nan, math.nan, level)

    # Numerically stable quadratic roots.
    sq = math.sqrt(disc)
    h = s.sxy + math.copysign(sq, s.sxy) if s.sxy != 0.0 else sq
    r1 = h / a
    r2 = c / h if h != 0.0 else -r1
    lo, hi = min(r1, r2), max(r1, r2)
    if a > 0.0:
        return FiellerInterval("bounded", lo, hi, level)
    if disc == 0.0:
        return FiellerInterval("all-reals", math.nan, math.nan, level)
    return FiellerInterval("complement", lo, hi, level)
