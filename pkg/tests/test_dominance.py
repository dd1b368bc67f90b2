import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanprop import dominance
from meanprop.dominance import (
    VerificationReport,
    check_degree_monotonicity,
    check_gc_derivative,
    check_induction_target,
    check_integrand_monotonicity,
    check_key_inequality,
    check_mlr_noncentral,
    check_ratio_lower_bound,
    default_lambda_grid,
    default_x_grid,
)
from meanprop.specfun import legendre_sequence
from meanprop.wishart import NoncentralSpec, g_central


def threshold(j):
    return (j + 1) / math.sqrt(j * (j + 2))


def test_default_grids():
    x = default_x_grid()
    assert x.size == 2000 and x[0] == pytest.approx(1 + 1e-8) and x[-1] == pytest.approx(1e3)
    assert np.all(np.diff(x) > 0)
    lam = default_lambda_grid()
    assert lam.size == 500 and lam[0] > 0 and lam[-1] == pytest.approx(60.0)


# --- key inequality -------------------------------------------------------------------


def test_key_inequality_degree_one_by_hand():
    x = np.linspace(1.0001, 50, 300)
    assert np.all(1 / x <= 2 * (x - np.sqrt(x**2 - 1)))
    report = check_key_inequality(1, x)
    assert report.passed and report.n_checked == x.size


def test_key_inequality_default_grid():
    report = check_key_inequality(200)
    assert report.passed
    assert report.n_checked == 200 * 2000
    assert report.worst_margin >= -1e-9


@pytest.mark.parametrize("j", [2, 5, 20])
def test_key_inequality_near_threshold(j):
    t = threshold(j)
    x = t * (1 + np.linspace(-1e-3, 1e-3, 41))
    report = check_key_inequality(j, x)
    assert report.passed
    assert report.worst_margin > 0


def test_key_inequality_matches_direct_evaluation():
    x = np.array([1.1, 2.0, 7.5])
    seq = legendre_sequence(x, 10)
    for j in range(1, 11):
        lhs = seq[j - 1] / seq[j]
        rhs = (j + 1) / j * (x - np.sqrt(x**2 - 1))
        assert np.all(lhs <= rhs)


def test_key_inequality_rejects_bad_grid():
    with pytest.raises(ValueError):
        check_key_inequality(3, [1.0, 2.0])


def test_induction_target_default_grid():
    assert check_induction_target(200).passed


# --- degree monotonicity and ratio bound -----------------------------------------------


def test_degree_monotonicity_at_one_is_equality():
    report = check_degree_monotonicity(50, [1.0])
    assert report.passed
    assert report.worst_margin == 0.0


def test_degree_monotonicity_strict_at_two():
    seq = legendre_sequence(2.0, 200)
    assert np.all(np.diff(seq) > 0)
    report = check_degree_monotonicity(200, [2.0])
    assert report.passed and report.worst_margin > 0


@settings(max_examples=30, deadline=None)
@given(xs=st.lists(st.floats(1.0, 50.0), min_size=1, max_size=20))
def test_degree_monotonicity_random(xs):
    assert check_degree_monotonicity(200, xs).passed


def test_ratio_lower_bound_degree_one_by_hand():
    x = np.linspace(1.001, 30, 100)
    seq = legendre_sequence(x, 2)
    np.testing.assert_allclose(seq[2] / seq[1], (3 * x**2 - 1) / (2 * x), rtol=1e-14)
    assert np.all(seq[2] / seq[1] >= x)


def test_ratio_lower_bound_restricted_and_full():
    restricted = check_ratio_lower_bound(200, restricted=True)
    full = check_ratio_lower_bound(200, restricted=False)
    assert restricted.passed and full.passed
    assert 0 < restricted.n_checked < full.n_checked
    assert "ratio_lower_bound" in restricted.check_name


# --- central function derivative ------------------------------------------------------


def test_gc_derivative_default_grid():
    report = check_gc_derivative()
    assert report.passed
    assert report.n_checked == 19 * (500 + 499)


def test_gc_derivative_p3_example():
    lam, h = 2.0, 1e-5
    # derivative in h = lambda2 / 2
    fd = (g_central(3, lam + h) - g_central(3, lam - h)) / h
    assert fd == pytest.approx(-math.exp(-1), rel=1e-8)


def test_gc_derivative_p2_limit():
    lam, h = 1e-8, 1e-9
    fd = (g_central(2, lam + h) - g_central(2, lam - h)) / h
    assert fd == pytest.approx(-math.sqrt(math.pi), rel=1e-4)


# --- likelihood ratio ----------------------------------------------------------------


def test_mlr_central_p3_reduces_to_gc():
    grid = np.linspace(0.01, 30, 40)
    report = check_mlr_noncentral(NoncentralSpec(3, 0.0), grid)
    assert report.passed
    assert np.all(np.diff([g_central(3, l) for l in grid]) < 0)


@pytest.mark.parametrize("p,kappa", [(2, 5.0), (10, 20.0)])
def test_mlr_noncentral_examples(p, kappa):
    report = check_mlr_noncentral(NoncentralSpec(p, kappa), np.linspace(0.01, 40, 80))
    assert report.passed
    assert report.n_checked == 79


def test_integrand_monotonicity():
    report = check_integrand_monotonicity(n=300, seed=1)
    assert report.passed and report.n_checked == 300


# --- report plumbing ------------------------------------------------------------------


def test_report_records_violation():
    report = dominance._record(
        VerificationReport("toy", "two points"), [{"i": 0}, {"i": 1}], [1.0, 3.0], [2.0, 2.0]
    )
    assert not report.passed
    assert report.n_violations == 1
    assert report.violations == [({"i": 1}, 3.0, 2.0, -1.0)]
    assert report.worst_margin == -1.0


def test_report_slack_absorbs_roundoff():
    report = dominance._record(VerificationReport("toy", ""), [0], [1.0 + 1e-12], [1.0])
    assert report.passed and report.worst_margin < 0


def test_report_violation_list_is_capped():
    n = dominance.MAX_LISTED_VIOLATIONS + 25
    report = dominance._record(VerificationReport("toy", ""), list(range(n)), np.ones(n), np.zeros(n))
    assert report.n_violations == n
    assert len(report.violations) == dominance.MAX_LISTED_VIOLATIONS


def test_report_json_fields():
    report = check_key_inequality(3, [1.5, 2.0])
    decoded = json.loads(report.to_json())
    assert list(decoded) == [
        "check_name", "grid_description", "violations", "worst_margin", "passed", "n_checked", "n_violations",
    ]
    assert decoded["passed"] is True and decoded["violations"] == []


def test_aggregate():
    good = check_key_inequality(3, [2.0])
    bad = dominance._record(VerificationReport("bad", ""), [0], [2.0], [1.0])
    assert dominance.aggregate([good])["passed"] is True
    summary = dominance.aggregate([good, bad])
    assert summary["passed"] is False
    assert [c["check_name"] for c in summary["checks"]] == ["key_inequality", "bad"]


def test_reports_independent_of_grid_order():
    x = default_x_grid(200)
    forward = check_key_inequality(20, x)
    backward = check_key_inequality(20, x[::-1])
    assert forward.worst_margin == backward.worst_margin
    assert forward.n_checked == backward.n_checked
