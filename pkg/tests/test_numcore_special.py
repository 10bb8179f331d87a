import math

import numpy as np
import pytest

from src.numcore.exceptions import DomainException
from src.numcore.schemas import BetaParams
from src.numcore.special import (
    beta_cdf,
    beta_quantile,
    beta_sf,
    beta_summary,
    digamma,
    expit,
    log_beta,
    log_gamma,
    logit,
)

EULER_GAMMA = 0.5772156649015329


class TestLogGamma:

    @pytest.mark.parametrize("x, expected", [
        (1.0, 0.0),
        (2.0, 0.0),
        (0.5, 0.5 * math.log(math.pi)),
        (10.0, math.log(362880.0)),
    ])
    def test_known_values(self, x, expected):
        assert log_gamma(x) == pytest.approx(expected, abs=1e-13)

    def test_recurrence(self):
        for x in np.linspace(0.05, 80.0, 57):
            assert log_gamma(x + 1.0) - log_gamma(x) == pytest.approx(math.log(x), rel=1e-12, abs=1e-12)

    def test_large_argument_is_finite(self):
        assert math.isfinite(log_gamma(1e8))

    @pytest.mark.parametrize("x", [0.0, -1.0, float("nan"), float("inf")])
    def test_domain(self, x):
        with pytest.raises(DomainException):
            log_gamma(x)


class TestDigamma:

    def test_at_one(self):
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-14)

    def test_at_half(self):
        assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2.0 * math.log(2.0), abs=1e-14)

    def test_recurrence(self):
        for x in np.linspace(0.1, 50.0, 41):
            assert digamma(x + 1.0) - digamma(x) == pytest.approx(1.0 / x, rel=1e-11)

    def test_domain(self):
        with pytest.raises(DomainException):
            digamma(0.0)


class TestBetaDistribution:

    def test_log_beta(self):
        assert log_beta(2.0, 3.0) == pytest.approx(math.log(1.0 / 12.0), abs=1e-14)

    def test_uniform_cdf_is_identity(self):
        uniform = BetaParams(alpha=1.0, beta=1.0)
        for p in (0.0, 0.1, 0.5, 0.9, 1.0):
            assert beta_cdf(p, uniform) == pytest.approx(p, abs=1e-15)

    def test_cdf_closed_forms(self):
        assert beta_cdf(0.3, BetaParams(alpha=2.0, beta=1.0)) == pytest.approx(0.09, abs=1e-14)
        assert beta_cdf(0.5, BetaParams(alpha=4.0, beta=4.0)) == pytest.approx(0.5, abs=1e-14)

    def test_sf_complements_cdf(self):
        params = BetaParams(alpha=9.0, beta=12.0)
        for p in np.linspace(0.0, 1.0, 11):
            assert beta_cdf(p, params) + beta_sf(p, params) == pytest.approx(1.0, abs=1e-14)

    def test_quantile_closed_form(self):
        # Beta(1, b): F^-1(q) = 1 - (1 - q)^(1/b)
        params = BetaParams(alpha=1.0, beta=11.0)
        for q in (0.025, 0.5, 0.975):
            assert beta_quantile(q, params) == pytest.approx(1.0 - (1.0 - q) ** (1.0 / 11.0), abs=1e-12)

    @pytest.mark.parametrize("alpha, beta", [
        (0.5, 0.5), (1.0, 30.0), (9.0, 12.0), (500.0, 0.5), (2000.0, 3000.0),
    ])
    def test_quantile_round_trip(self, alpha, beta):
        params = BetaParams(alpha=alpha, beta=beta)
        for q in (1e-6, 0.025, 0.5, 0.975, 1.0 - 1e-6):
            x = beta_quantile(q, params)
            # q sits between the CDF values of the doubles next to x
            below = beta_cdf(max(0.0, x - 4 * np.spacing(x)), params)
            above = beta_cdf(min(1.0, x + 4 * np.spacing(x)), params)
            assert below - 1e-9 <= q <= above + 1e-9

    def test_steep_upper_tail_is_within_a_few_ulps(self):
        params = BetaParams(alpha=500.0, beta=0.5)
        x = beta_quantile(1.0 - 1e-6, params)
        assert 0.0 < x < 1.0
        assert beta_cdf(x, params) == pytest.approx(1.0 - 1e-6, abs=1e-7)

    @pytest.mark.parametrize("alpha, beta", [(0.000173, 13.05), (0.000585, 16.14)])
    def test_lower_quantile_underflows_to_zero(self, alpha, beta):
        # nearly all mass sits at 0; the 2.5% quantile is below the smallest double
        params = BetaParams(alpha=alpha, beta=beta)
        assert 0.0 <= beta_quantile(0.025, params) < 1e-300
        assert 0.0 <= beta_quantile(0.975, params) < 1e-3

    def test_symmetric_median(self):
        assert beta_quantile(0.5, BetaParams(alpha=0.05, beta=0.05)) == pytest.approx(0.5, abs=1e-6)

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, q):
        with pytest.raises(DomainException):
            beta_quantile(q, BetaParams(alpha=2.0, beta=2.0))

    def test_cdf_domain(self):
        with pytest.raises(DomainException):
            beta_cdf(1.5, BetaParams(alpha=2.0, beta=2.0))

    def test_domain_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            log_beta(-1.0, 2.0)


class TestBetaSummary:

    def test_nsclc_no_borrowing(self):
        # 8 responders of 19, uniform prior, null rate 0.15
        mean, sd, lower, upper, pp = beta_summary(np.array([9.0]), np.array([12.0]), 0.15)
        assert 100 * mean[0] == pytest.approx(42.9, abs=0.05)
        assert 100 * lower[0] == pytest.approx(23.1, abs=0.1)
        assert 100 * upper[0] == pytest.approx(63.9, abs=0.1)
        assert 100 * pp[0] == pytest.approx(99.9, abs=0.1)
        assert sd[0] == pytest.approx(math.sqrt(9 * 12 / (21**2 * 22)), rel=1e-12)

    def test_no_responders(self):
        mean, _, lower, upper, pp = beta_summary(np.array([1.0]), np.array([11.0]), 0.15)
        assert 100 * mean[0] == pytest.approx(8.3, abs=0.05)
        assert 100 * lower[0] == pytest.approx(0.2, abs=0.05)
        assert 100 * upper[0] == pytest.approx(28.5, abs=0.05)
        assert pp[0] == pytest.approx(0.85**11, abs=1e-12)

    def test_vectorised_matches_scalar(self):
        alpha = np.array([1.0, 2.5, 40.0])
        beta = np.array([3.0, 2.5, 7.0])
        _, _, lower, upper, pp = beta_summary(alpha, beta, 0.2)
        for k in range(3):
            params = BetaParams(alpha=alpha[k], beta=beta[k])
            assert lower[k] == beta_quantile(0.025, params)
            assert upper[k] == beta_quantile(0.975, params)
            assert pp[k] == pytest.approx(beta_sf(0.2, params), abs=1e-15)

    def test_tiny_alpha_posterior_has_zero_lower_limit(self):
        mean, _, lower, upper, pp = beta_summary(np.array([0.000173]), np.array([13.05]), 0.1)
        assert 0.0 <= lower[0] < 1e-300
        assert lower[0] <= mean[0] <= upper[0]
        assert pp[0] < 1e-3

    def test_tail_of_default_level(self):
        alpha, beta = np.array([2.0]), np.array([5.0])
        _, _, lower, _, _ = beta_summary(alpha, beta, 0.2, level=0.95)
        assert lower[0] == beta_quantile(0.025, BetaParams(alpha=2.0, beta=5.0))

    def test_rejects_non_positive_shapes(self):
        with pytest.raises(DomainException):
            beta_summary(np.array([0.0]), np.array([1.0]), 0.1)


def test_logit_expit_inverse():
    p = np.linspace(0.01, 0.99, 25)
    np.testing.assert_allclose(expit(logit(p)), p, atol=1e-14)
