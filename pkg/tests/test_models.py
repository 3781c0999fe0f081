import math

import numpy as np
import pytest
from scipy import stats

from distortion_sensitivity import Dataset, Exponential, Gamma, LogNormal, Normal, gamma_prior, normal_prior, prior_cdf
from distortion_sensitivity.errors import DomainError, ModelContractError
from distortion_sensitivity.models import default_prior, model_from_name

CASES = [
    (Exponential(), (1.7,), (1e-3, 6.0)),
    (Gamma(), (2.5, 1.3), (1e-3, 9.0)),
    (Gamma(), (0.7, 0.4), (1e-3, 15.0)),
    (LogNormal(), (0.3, 0.8), (1e-2, 12.0)),
    (Normal(), (-1.0, 2.0), (-8.0, 6.0)),
    (Normal(mu=0.0), (1.5,), (-6.0, 6.0)),
]
IDS = ["exp", "gamma", "gamma-small-shape", "lognormal", "normal", "normal-mu0"]


def test_log_pdf_examples():
    assert Exponential().log_pdf([1.0], 0.0) == 0.0
    assert Exponential().log_pdf([2.0], 1.0) == pytest.approx(math.log(2) - 2, abs=1e-15)
    assert Gamma().log_pdf([1.0, 1.0], 1.0) == pytest.approx(-1.0, abs=1e-15)


def test_cdf_examples():
    assert Exponential().cdf([1.0], 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    assert Normal().cdf([0.0, 1.0], 0.0) == 0.5
    for m, theta, _ in CASES:
        assert m.cdf(theta, -np.inf) == 0.0


@pytest.mark.parametrize("model,theta,rng_", CASES, ids=IDS)
def test_cdf_plus_survival_is_one(model, theta, rng_):
    x = np.linspace(*rng_, 1000)
    s = model.cdf(theta, x) + model.survival(theta, x)
    assert np.max(np.abs(s - 1.0)) <= 1e-12


@pytest.mark.parametrize("model,theta,rng_", CASES, ids=IDS)
def test_pdf_is_derivative_of_cdf(model, theta, rng_):
    x = np.linspace(rng_[0] + 0.01, rng_[1], 1000)
    h = 1e-5
    fd = (model.cdf(theta, x + h) - model.cdf(theta, x - h)) / (2 * h)
    assert np.max(np.abs(fd - model.pdf(theta, x))) <= 1e-6


@pytest.mark.parametrize("model,theta,rng_", CASES, ids=IDS)
def test_quantile_round_trip(model, theta, rng_):
    u = np.linspace(0.001, 0.999, 500)
    assert np.max(np.abs(model.cdf(theta, model.quantile(theta, u)) - u)) <= 1e-8


@pytest.mark.parametrize("model,theta,rng_", CASES, ids=IDS)
def test_log_forms_agree_with_direct_forms(model, theta, rng_):
    x = np.linspace(*rng_, 200)
    np.testing.assert_allclose(np.exp(model.log_cdf(theta, x)), model.cdf(theta, x), rtol=1e-12, atol=1e-300)
    np.testing.assert_allclose(np.exp(model.log_survival(theta, x)), model.survival(theta, x), rtol=1e-12, atol=1e-300)


def test_log_tails_stay_finite():
    # far tails where cdf or survival underflows to 0 in double precision
    assert np.isfinite(Normal().log_cdf([0.0, 1.0], -40.0))
    assert np.isfinite(Exponential().log_survival([1.0], 800.0))
    assert Exponential().log_survival([1.0], 800.0) == pytest.approx(-800.0)


@pytest.mark.parametrize("model,theta,scipy_dist", [
    (Exponential(), (0.5,), stats.expon(scale=2.0)),
    (Gamma(), (2.0, 3.0), stats.gamma(2.0, scale=1 / 3.0)),
    (LogNormal(), (0.2, 0.5), stats.lognorm(0.5, scale=math.exp(0.2))),
    (Normal(), (1.0, 2.0), stats.norm(1.0, 2.0)),
])
def test_simulate_matches_distribution(model, theta, scipy_dist):
    d = model.simulate(theta, 4000, seed=7)
    assert stats.kstest(d.values, scipy_dist.cdf).pvalue > 1e-3
    np.testing.assert_allclose(model.cdf(theta, d.values[:50]), scipy_dist.cdf(d.values[:50]), rtol=1e-12)


def test_simulate_mean_and_determinism():
    d = Exponential().simulate((0.5,), 100_000, seed=3)
    assert abs(d.values.mean() - 2.0) < 3 * 2.0 / math.sqrt(1e5)
    assert np.array_equal(d.values, Exponential().simulate((0.5,), 100_000, seed=3).values)
    assert Exponential().simulate((0.5,), 1, seed=3).n == 1


def test_invalid_theta_raises():
    with pytest.raises(DomainError):
        Exponential().cdf([-1.0], 1.0)
    with pytest.raises(DomainError):
        Gamma().log_pdf([1.0, 0.0], 1.0)
    with pytest.raises(DomainError):
        Exponential().simulate((0.0,), 5, seed=1)


def test_draw_matrix_broadcasting():
    theta = np.array([[1.0], [2.0], [3.0]])
    out = Exponential().log_pdf(theta, np.array([0.5, 1.0]))
    assert out.shape == (3, 2)
    assert out[1, 1] == pytest.approx(math.log(2) - 2)


def test_prior_cdf_examples():
    assert prior_cdf(gamma_prior(1, 1), [0.0])[0] == 0.0
    assert prior_cdf(gamma_prior(1, 1), [math.log(2)])[0] == pytest.approx(0.5, abs=1e-15)
    assert prior_cdf(normal_prior(0, 1), [0.0])[0] == 0.5
    with pytest.raises(ModelContractError):
        prior_cdf(gamma_prior(1, 1), [1.0, 2.0])


def test_dataset_is_read_only_and_finite():
    d = Dataset([1.0, 2.0], source="x")
    with pytest.raises(ValueError):
        d.values[0] = 5.0
    with pytest.raises(DomainError):
        Dataset([1.0, float("nan")])


def test_registry_and_default_priors():
    for name in ("exponential", "gamma", "lognormal", "normal"):
        m = model_from_name(name)
        assert default_prior(m).k == m.k
    assert Normal(mu=0.0).symmetric_about_zero
    assert not Normal(mu=1.0).symmetric_about_zero
    assert not Exponential().symmetric_about_zero
