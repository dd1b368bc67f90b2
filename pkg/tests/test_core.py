import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from meanprop.core import (
    INFINITE_SLOPE,
    GramMatrix,
    Sample,
    eigen2,
    fieller_interval,
    gram,
    minimize_pivot,
    pivot,
    proportionality_test,
    smallest_eigenvalue,
    whiten,
)
from meanprop.exceptions import DimensionError, DomainError
from meanprop.specfun import chi2_cdf, chi2_quantile


def random_sample(rng, p=7, sigma=False):
    x = rng.standard_normal(p)
    y = rng.standard_normal(p)
    if sigma:
        a = rng.standard_normal((p, p))
        return Sample(x, y, a @ a.T + p * np.eye(p))
    return Sample(x, y)


def grid_minimum(s, n=1_000_000):
    """Brute-force minimum of the pivot over n directions covering beta -> inf."""
    theta = np.linspace(-0.5 * np.pi, 0.5 * np.pi, n, endpoint=False)
    sn, cs = np.sin(theta), np.cos(theta)
    vals = s.sxx * sn * sn - 2 * s.sxy * sn * cs + s.syy * cs * cs
    return vals.min(), np.pi / n


# --- Sample -----------------------------------------------------------------


def test_sample_validation():
    with pytest.raises(DimensionError):
        Sample([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        Sample([1.0], [2.0])
    with pytest.raises(DimensionError):
        Sample([[1.0, 2.0]], [[1.0, 2.0]])
    with pytest.raises(DomainError):
        Sample([1.0, math.nan], [1.0, 2.0])
    with pytest.raises(DomainError):
        Sample([1.0, 2.0], [1.0, 2.0], [[1.0, 0.5], [0.4, 1.0]])
    with pytest.raises(DomainError):
        Sample([1.0, 2.0], [1.0, 2.0], [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(DimensionError):
        Sample([1.0, 2.0], [1.0, 2.0], np.eye(3))


# --- gram ---------------------------------------------------------------------


def test_gram_examples():
    assert gram(Sample([1, 0], [0, 1])) == GramMatrix(1.0, 0.0, 1.0)
    s = gram(Sample([1, 2], [2, 4]))
    assert s == GramMatrix(5.0, 10.0, 20.0)
    assert s.det == 0.0


def test_gram_matches_naive_loop():
    rng = np.random.default_rng(1)
    x, y = rng.standard_normal(7), rng.standard_normal(7)
    sxx = sxy = syy = 0.0
    for i in range(7):
        sxx += x[i] * x[i]
        sxy += x[i] * y[i]
        syy += y[i] * y[i]
    s = gram(Sample(x, y))
    assert (s.sxx, s.sxy, s.syy) == pytest.approx((sxx, sxy, syy), rel=1e-15)


# --- whiten -------------------------------------------------------------------


def test_whiten_identity_unchanged():
    s = Sample([1.0, 2.0, 3.0], [0.5, -1.0, 2.0], np.eye(3))
    w = whiten(s)
    np.testing.assert_array_equal(w.x, s.x)
    np.testing.assert_array_equal(w.y, s.y)
    assert w.sigma is None


def test_whiten_scalar_covariance():
    w = whiten(Sample([2.0, 2.0], [4.0, 0.0], 4 * np.eye(2)))
    np.testing.assert_allclose(w.x, [1.0, 1.0])
    np.testing.assert_allclose(w.y, [2.0, 0.0])


def test_whiten_gram_matches_explicit_inverse():
    rng = np.random.default_rng(2)
    for _ in range(20):
        s = random_sample(rng, p=6, sigma=True)
        inv = np.linalg.inv(s.sigma)
        expected = (s.x @ inv @ s.x, s.x @ inv @ s.y, s.y @ inv @ s.y)
        g = gram(whiten(s))
        assert (g.sxx, g.sxy, g.syy) == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_whitening_invariance_of_test():
    rng = np.random.default_rng(3)
    for _ in range(20):
        s = random_sample(rng, p=5, sigma=True)
        a = proportionality_test(s)
        w = whiten(s)
        b = proportionality_test(Sample(w.x, w.y))
        assert a.statistic == pytest.approx(b.statistic, rel=1e-9, abs=1e-12)


# --- pivot ----------------------------------------------------------------


def test_pivot_examples():
    x = np.array([1.0, -2.0, 0.5])
    assert pivot(Sample(x, 3 * x), 3.0) == pytest.approx(0.0, abs=1e-14)
    assert pivot(Sample([1, 0], [0, 1]), 0.0) == 1.0


def test_pivot_matches_vector_arithmetic():
    rng = np.random.default_rng(4)
    s = random_sample(rng)
    for beta in np.linspace(-10, 10, 41):
        r = s.y - beta * s.x
        assert pivot(s, beta) == pytest.approx(r @ r / (1 + beta * beta), rel=1e-12)


def test_pivot_infinite_slope_limit():
    s = GramMatrix(2.0, 0.7, 5.0)
    assert pivot(s, INFINITE_SLOPE) == 2.0
    assert pivot(s, 1e8) == pytest.approx(2.0, rel=1e-7)


# --- eigen2 ---------------------------------------------------------------------


def test_eigen2_examples():
    e = eigen2(GramMatrix(2.0, 0.0, 1.0))
    assert (e.lambda1, e.lambda2) == (2.0, 1.0)
    e = eigen2(GramMatrix(2.0, 1.0, 2.0))
    assert (e.lambda1, e.lambda2) == pytest.approx((3.0, 1.0), rel=1e-15)


def test_eigen2_rank_deficient_clamped():
    e = eigen2(gram(Sample([0.1, 0.7, 0.3], [0.3, 2.1, 0.9])))
    assert e.lambda2 >= 0.0
    assert e.lambda2 == pytest.approx(0.0, abs=1e-14)


def test_eigen2_trace_det_and_grid_oracle():
    rng = np.random.default_rng(5)
    for _ in range(25):
        s = gram(random_sample(rng))
        e = eigen2(s)
        assert e.lambda1 >= e.lambda2 >= 0
        assert e.lambda1 + e.lambda2 == pytest.approx(s.trace, rel=1e-10)
        assert e.lambda1 * e.lambda2 == pytest.approx(s.det, rel=1e-10)
        gmin, step = grid_minimum(s, 100_000)
        assert 0.0 <= gmin - e.lambda2 <= (e.lambda1 - e.lambda2) * (step / 2) ** 2 + 1e-12 * s.trace


def test_smallest_eigenvalue_vectorized():
    sxx = np.array([2.0, 2.0, 5.0])
    sxy = np.array([0.0, 1.0, 10.0])
    syy = np.array([1.0, 2.0, 20.0])
    np.testing.assert_allclose(smallest_eigenvalue(sxx, sxy, syy), [1.0, 1.0, 0.0], atol=1e-14)


# --- minimize_pivot ------------------------------------------------------------


def test_minimize_pivot_exact_proportionality():
    beta, minimum = minimize_pivot(Sample([1.0, 3.0], [2.0, 6.0]))
    assert beta == pytest.approx(2.0, rel=1e-14)
    assert minimum == pytest.approx(0.0, abs=1e-13)


def test_minimize_pivot_vertical_direction():
    s = GramMatrix(1.0, 0.0, 4.0)
    beta, minimum = minimize_pivot(s)
    assert beta == INFINITE_SLOPE
    assert minimum == 1.0
    # over finite slopes the infimum 1 is approached but never attained
    betas = np.concatenate([-np.logspace(6, -3, 2000), np.logspace(-3, 6, 2000)])
    vals = np.array([pivot(s, b) for b in betas])
    assert np.all(vals > 1.0)
    assert vals.min() == pytest.approx(1.0, abs=1e-11)


def test_minimize_pivot_self_consistent():
    rng = np.random.default_rng(6)
    for _ in range(200):
        s = gram(random_sample(rng, p=4))
        beta, minimum = minimize_pivot(s)
        assert math.isfinite(beta)
        assert pivot(s, beta) == pytest.approx(minimum, rel=1e-9, abs=1e-12)
        assert minimum == eigen2(s).lambda2


def test_minimality_random():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        s = gram(random_sample(rng, p=int(rng.integers(2, 12))))
        lam2 = eigen2(s).lambda2
        betas = rng.standard_cauchy(100) * 3
        vals = (s.syy - 2 * betas * s.sxy + betas**2 * s.sxx) / (1 + betas**2)
        assert np.all(lam2 <= vals + 1e-12 * s.trace)


@settings(max_examples=100, deadline=None)
@given(
    x=arrays(float, 4, elements=st.floats(-100, 100)),
    y=arrays(float, 4, elements=st.floats(-100, 100)),
    c=st.floats(0.01, 100),
)
def test_scale_consistency(x, y, c):
    s = gram(Sample(x, c * y))
    assert s == GramMatrix(float(x @ x), float(x @ (c * y)), float((c * y) @ (c * y)))
    _, minimum = minimize_pivot(Sample(x, c * y))
    assert minimum == eigen2(s).lambda2


# --- proportionality_test ---------------------------------------------------------


def test_exactly_proportional():
    out = proportionality_test(Sample([1.0, 2.0, -1.0], [2.0, 4.0, -2.0]), 0.05)
    assert out.statistic == pytest.approx(0.0, abs=1e-13)
    assert out.p_value == pytest.approx(1.0, abs=1e-12)
    assert not out.reject
    assert out.df == 2


def test_orthogonal_unit_vectors():
    out = proportionality_test(Sample([1, 0], [0, 1]), 0.05)
    assert out.statistic == 1.0
    assert out.df == 1
    # chi2_1 tail through the normal CDF
    assert out.p_value == pytest.approx(2 * (1 - 0.5 * (1 + math.erf(1 / math.sqrt(2)))), rel=1e-12)
    assert out.p_value == pytest.approx(0.3173, abs=1e-4)
    assert not out.reject


def test_reject_iff_p_value_below_alpha():
    rng = np.random.default_rng(8)
    for _ in range(300):
        s = Sample(rng.standard_normal(3) * 2, rng.standard_normal(3) * 2)
        for alpha in (0.01, 0.05, 0.2):
            out = proportionality_test(s, alpha)
            assert out.reject == (out.p_value < alpha)
            assert out.p_value == pytest.approx(1 - chi2_cdf(out.df, out.statistic), abs=1e-14)


def test_alpha_domain():
    with pytest.raises(DomainError):
        proportionality_test(Sample([1, 0], [0, 1]), 1.0)


def test_null_rejection_rate_below_alpha():
    rng = np.random.default_rng(9)
    p, n, alpha = 3, 4000, 0.1
    mu = np.array([1.5, 0.0, 0.0])
    rejections = sum(
        proportionality_test(Sample(mu + rng.standard_normal(p), -0.5 * mu + rng.standard_normal(p)), alpha).reject
        for _ in range(n)
    )
    assert rejections / n < alpha


def test_outcome_asdict_order():
    out = proportionality_test(Sample([1, 0], [0, 1]))
    assert list(out.asdict()) == ["statistic", "df", "p_value", "beta_hat", "reject"]


# --- fieller_interval ----------------------------------------------------------------


def test_fieller_all_reals():
    iv = fieller_interval(Sample([1, 0], [2, 0]), 0.95)
    assert iv.kind == "all-reals"
    assert 123.0 in iv


def test_fieller_bounded_contains_truth():
    x = np.array([6.0, 8.0])  # |x|^2 = 100
    iv = fieller_interval(Sample(x, 3 * x), 0.95)
    assert iv.kind == "bounded"
    assert 3.0 in iv
    # roots of beta^2 (100 - q) - 600 beta + (900 - q) = 0 with q = chi2_2(0.95)
    q = -2 * math.log(0.05)
    a, b, c = 100 - q, -600.0, 900 - q
    r = sorted(np.roots([a, b, c]).real)
    assert (iv.lower, iv.upper) == pytest.approx(r, rel=1e-12)


def test_fieller_empty():
    iv = fieller_interval(Sample([10.0, 0.0], [0.0, 10.0]), 0.95)
    assert iv.kind == "empty"
    assert 0.0 not in iv


def test_fieller_complement():
    iv = fieller_interval(Sample([1.0, 0.5], [3.0, 1.0]), 0.95)
    assert iv.kind == "complement"
    beta_hat, _ = minimize_pivot(Sample([1.0, 0.5], [3.0, 1.0]))
    assert beta_hat in iv
    assert 0.5 * (iv.lower + iv.upper) not in iv


def test_fieller_linear_case():
    q = chi2_quantile(2, 0.9)
    x = np.array([math.sqrt(q), 0.0])
    iv = fieller_interval(Sample(x, [1.0, 0.5]), 0.9)
    assert iv.kind == "complement"
    assert math.isinf(iv.lower) or math.isinf(iv.upper)


def test_fieller_test_duality():
    rng = np.random.default_rng(10)
    for _ in range(500):
        s = Sample(rng.standard_normal(3) * 3, rng.standard_normal(3) * 3)
        level = float(rng.uniform(0.5, 0.99))
        iv = fieller_interval(s, level)
        lam2 = eigen2(gram(s)).lambda2
        assert (iv.kind == "empty") == (lam2 > chi2_quantile(3, level))
        if iv.kind != "empty":
            beta_hat, _ = minimize_pivot(s)
            assert beta_hat in iv
            if iv.kind == "bounded":
                assert iv.lower <= iv.upper
                for b in (iv.lower, iv.upper):
                    assert pivot(s, b) == pytest.approx(chi2_quantile(3, level), rel=1e-8)


def test_pivot_at_true_slope_is_chi2_p():
    rng = np.random.default_rng(11)
    p, beta, n = 4, -1.7, 100_000
    mu = np.array([1.0, 2.0, 0.0, -1.0])
    x = mu + rng.standard_normal((n, p))
    y = beta * mu + rng.standard_normal((n, p))
    vals = np.array(
        [pivot(GramMatrix(float(a @ a), float(a @ b), float(b @ b)), beta) for a, b in zip(x, y)]
    )
    vals.sort()
    grid = np.linspace(0.1, 20, 200)
    ecdf = np.searchsorted(vals, grid, side="right") / n
    eps = math.sqrt(math.log(2 / 0.001) / (2 * n))
    assert np.max(np.abs(ecdf - chi2_cdf(p, grid))) < eps
