import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from distortion_sensitivity import (
    CENSOR_LOWER, CENSOR_UPPER, POWER_CDF, POWER_SURVIVAL, SKEWING,
    Dataset, Exponential, Gamma, LogNormal, Normal, ScoreContext,
    distort_cdf, family_from_name, gamma_prior, normal_prior, prior_score, score, score_sum,
)
from distortion_sensitivity.distortion import log_h_prime, score_sum_draws
from distortion_sensitivity.errors import (
    DomainError, ModelContractError, ScoreUndefinedError, UnsupportedKindError,
)
from distortion_sensitivity.models import Frozen, Prior

NON_SKEW = [POWER_CDF, POWER_SURVIVAL, CENSOR_LOWER, CENSOR_UPPER]


def admissible_alpha(family):
    if family in (POWER_CDF, POWER_SURVIVAL):
        return st.floats(1.0, 20.0)
    if family is CENSOR_LOWER:
        return st.floats(0.0, 0.99)
    return st.floats(0.01, 1.0)


class TestDistortCdf:
    def test_examples(self):
        assert distort_cdf(POWER_CDF, 2.0, 0.5) == 0.25
        assert distort_cdf(POWER_SURVIVAL, 3.0, 0.0) == 0.0
        assert distort_cdf(CENSOR_UPPER, 0.5, 0.25) == 0.5

    def test_identity_at_alpha0_is_exact(self):
        u = np.linspace(0, 1, 101)
        for fam in NON_SKEW:
            assert np.array_equal(distort_cdf(fam, fam.alpha0, u), u)

    def test_errors(self):
        with pytest.raises(DomainError):
            distort_cdf(POWER_CDF, 0.5, 0.3)
        with pytest.raises(DomainError):
            distort_cdf(CENSOR_UPPER, 0.0, 0.3)
        with pytest.raises(DomainError):
            distort_cdf(POWER_CDF, 2.0, 1.2)
        with pytest.raises(UnsupportedKindError):
            distort_cdf(SKEWING, 0.5, 0.3)

    @pytest.mark.parametrize("family", NON_SKEW, ids=lambda f: f.name)
    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_endpoints_and_monotone(self, family, data):
        alpha = data.draw(admissible_alpha(family))
        u = np.sort(np.array(data.draw(st.lists(st.floats(0, 1), min_size=2, max_size=30))))
        h = distort_cdf(family, alpha, u)
        assert distort_cdf(family, alpha, 0.0) == 0.0
        assert distort_cdf(family, alpha, 1.0) == 1.0
        assert np.all(np.diff(h) >= 0)
        assert np.all((h >= 0) & (h <= 1))

    @pytest.mark.parametrize("family", [POWER_CDF, POWER_SURVIVAL], ids=lambda f: f.name)
    @settings(max_examples=40, deadline=None)
    @given(alpha=st.floats(1.0, 6.0), u=st.floats(0.02, 0.98))
    def test_log_h_prime_is_derivative(self, family, alpha, u):
        e = 1e-6
        fd = (distort_cdf(family, alpha, u + e) - distort_cdf(family, alpha, u - e)) / (2 * e)
        assert math.exp(log_h_prime(family, alpha, u)) == pytest.approx(fd, rel=1e-5)

    def test_family_lookup(self):
        assert family_from_name("Power_CDF") is POWER_CDF
        with pytest.raises(UnsupportedKindError):
            family_from_name("power-pdf")


class TestScore:
    def test_power_cdf_examples(self):
        # pick x so that F(x) = 1 (numerically) and F(x) = 1/e
        m = Exponential()
        assert score(POWER_CDF, ScoreContext(m, np.array([1.0]), 1e3)) == pytest.approx(1.0, abs=1e-15)
        x = -math.log1p(-math.exp(-1.0))
        assert score(POWER_CDF, ScoreContext(m, np.array([1.0]), x)) == pytest.approx(0.0, abs=1e-14)

    def test_skewing_standard_normal(self):
        s = score(SKEWING, ScoreContext(Normal(mu=0.0), np.array([1.0]), 1.0))
        assert s == pytest.approx(2.0 / math.sqrt(2.0 * math.pi), rel=1e-14)
        assert s == pytest.approx(0.7978846, abs=1e-7)

    def test_censoring_constants(self):
        ctx = ScoreContext(Gamma(), np.array([2.0, 1.0]), 0.7)
        assert score(CENSOR_LOWER, ctx) == 1.0
        assert score(CENSOR_UPPER, ctx) == -1.0

    def test_undefined_and_contract_errors(self):
        with pytest.raises(ScoreUndefinedError):
            score(POWER_CDF, ScoreContext(Exponential(), np.array([1.0]), 0.0))
        # far tails are evaluated in log space, so they stay defined
        assert math.isfinite(score(POWER_SURVIVAL, ScoreContext(Normal(), np.array([0.0, 1.0]), 50.0)))
        with pytest.raises(ModelContractError):
            score(SKEWING, ScoreContext(Exponential(), np.array([1.0]), 1.0))
        with pytest.raises(ModelContractError):
            score(SKEWING, ScoreContext(Normal(mu=1.0), np.array([1.0]), 1.0))
        with pytest.raises(ModelContractError):
            score(POWER_CDF, ScoreContext(Exponential(), np.array([1.0]), [1.0, 2.0]))


class TestScoreSum:
    def test_examples(self):
        assert score_sum(POWER_SURVIVAL, Exponential(), [1.0], Dataset([1.0, 1.0])) == pytest.approx(0.0, abs=1e-15)
        assert score_sum(CENSOR_LOWER, LogNormal(), [0.0, 1.0], Dataset([1, 2, 3, 4, 5])) == 5.0
        assert score_sum(POWER_CDF, Gamma(), [2.0, 1.0], Dataset([])) == 0.0

    @settings(max_examples=40, deadline=None)
    @given(xs=st.lists(st.floats(0.01, 30.0), min_size=1, max_size=25), rate=st.floats(0.05, 5.0))
    def test_sum_of_scores(self, xs, rate):
        m, theta = Exponential(), np.array([rate])
        for fam in (POWER_CDF, POWER_SURVIVAL):
            try:
                direct = sum(score(fam, ScoreContext(m, theta, x)) for x in xs)
            except ScoreUndefinedError:
                continue
            assert score_sum(fam, m, theta, Dataset(xs)) == pytest.approx(direct, rel=1e-10, abs=1e-10)

    def test_draw_matrix_error_locates_draw_and_observation(self):
        draws = np.array([[1.0], [2.0], [3.0]])
        with pytest.raises(ScoreUndefinedError) as info:
            score_sum_draws(POWER_CDF, Exponential(), draws, Dataset([1.0, 2.0, 0.0]))
        assert info.value.draw == 0
        assert info.value.observation == 2


class TestPriorScore:
    def test_examples(self):
        # Exponential(1) prior: F(theta) = 1 - exp(-theta)
        p = gamma_prior(1, 1)
        assert prior_score(POWER_CDF, p, [800.0]) == pytest.approx(1.0, abs=1e-15)
        theta = -math.log1p(-math.exp(-2.0))
        assert prior_score(POWER_CDF, p, [theta]) == pytest.approx(-1.0, abs=1e-13)
        assert prior_score(POWER_SURVIVAL, p, [1.0]) == pytest.approx(0.0, abs=1e-15)

    def test_product_prior_sums_components(self):
        pr = Prior((gamma_prior(2, 1), gamma_prior(3, 2)))
        th = np.array([1.5, 0.8])
        want = (1 + gamma_prior(2, 1).log_cdf(1.5)) + (1 + gamma_prior(3, 2).log_cdf(0.8))
        assert prior_score(POWER_CDF, pr, th) == pytest.approx(want, rel=1e-14)
        assert prior_score(CENSOR_UPPER, pr, th) == -2.0

    def test_skewing_needs_centred_prior(self):
        assert prior_score(SKEWING, normal_prior(0, 2), [1.0]) == pytest.approx(2 * normal_prior(0, 2).cdf(0) * 0 + 2 / (2 * math.sqrt(2 * math.pi)))
        with pytest.raises(ModelContractError):
            prior_score(SKEWING, gamma_prior(1, 1), [1.0])
