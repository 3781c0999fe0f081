"""Bayesian local sensitivity to distortions of the likelihood and the prior."""
from .distortion import (
    CENSOR_LOWER,
    CENSOR_UPPER,
    POWER_CDF,
    POWER_SURVIVAL,
    SKEWING,
    DistortionFamily,
    Kind,
    Mode,
    ScoreContext,
    distort_cdf,
    family_from_name,
    prior_score,
    score,
    score_sum,
)
from .kernels import BACKEND
from .models import (
    Dataset,
    Exponential,
    Frozen,
    Gamma,
    LogNormal,
    Normal,
    Prior,
    default_prior,
    gamma_prior,
    normal_prior,
    prior_cdf,
)
from .posterior import (
    PosteriorDraws,
    SamplerConfig,
    conjugate_gamma_exponential,
    distorted_expectation_reweighted,
    sample_posterior,
)
from .sensitivity import (
    GFunction,
    SensitivityReport,
    clt_interval,
    estimate_delta,
    finite_difference_check,
    mc_standard_error,
)

__version__ = "0.1.0"
