"""Distortion families and their scores.

A distortion h_alpha maps [0, 1] onto itself, fixes 0 and 1, and reduces to
the identity at ``alpha0``. The score of a family is the derivative in alpha
of ``log h'_alpha(F(x | theta))`` at ``alpha0``; the sensitivity estimators are
covariances between a function of the parameter and sums of these scores.

==================  =======  =============================  ====================
family              alpha0   h_alpha(y)                     score per observation
==================  =======  =============================  ====================
``power-cdf``       1        y ** alpha                     1 + log F(x)
``power-survival``  1        1 - (1 - y) ** alpha           1 + log S(x)
``censor-lower``    0        max((y - a) / (1 - a), 0)      +1
``censor-upper``    1        min(y / a, 1)                  -1
``skewing``         0        model-dependent                2 f(0) x
==================  =======  =============================  ====================
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _codes
from . import _kernels_np
from . import kernels
from .errors import DomainError, ModelContractError, ScoreUndefinedError, UnsupportedKindError
from .models import Frozen, Prior


class Kind(str, Enum):
    POWER_CDF = "power-cdf"
    POWER_SURVIVAL = "power-survival"
    CENSOR_LOWER = "censor-lower"
    CENSOR_UPPER = "censor-upper"
    SKEWING = "skewing"


class Mode(str, Enum):
    """Which distribution function the distortion composes."""

    LIKELIHOOD = "likelihood"
    PRIOR = "prior"
    DOUBLE = "double"


def mode_from_name(name):
    if isinstance(name, Mode):
        return name
    try:
        return Mode(str(name).strip().lower())
    except ValueError:
        raise UnsupportedKindError(f"unknown sensitivity mode {name!r}; choose from {[m.value for m in Mode]}") from None


@dataclass(frozen=True)
class DistortionFamily:
    kind: Kind
    alpha0: float
    description: str = ""

    @property
    def name(self):
        return self.kind.value

    @property
    def code(self):
        return _FAMILY_CODES[self.kind]

    @property
    def is_censoring(self):
        return self.kind in (Kind.CENSOR_LOWER, Kind.CENSOR_UPPER)

    def admissible(self, alpha):
        a = float(alpha)
        if not math.isfinite(a):
            return False
        if self.kind in (Kind.POWER_CDF, Kind.POWER_SURVIVAL):
            return a >= 1.0
        if self.kind is Kind.CENSOR_LOWER:
            return 0.0 <= a < 1.0
        if self.kind is Kind.CENSOR_UPPER:
            return 0.0 < a <= 1.0
        return True


_FAMILY_CODES = {
    Kind.POWER_CDF: _codes.POWER_CDF,
    Kind.POWER_SURVIVAL: _codes.POWER_SURVIVAL,
    Kind.CENSOR_LOWER: _codes.CENSOR_LOWER,
    Kind.CENSOR_UPPER: _codes.CENSOR_UPPER,
    Kind.SKEWING: _codes.SKEWING,
}

POWER_CDF = DistortionFamily(Kind.POWER_CDF, 1.0, "power distortion of the CDF, h(y) = y^alpha")
POWER_SURVIVAL = DistortionFamily(Kind.POWER_SURVIVAL, 1.0, "power distortion of the survival, h(y) = 1-(1-y)^alpha")
CENSOR_LOWER = DistortionFamily(Kind.CENSOR_LOWER, 0.0, "lower censoring, h(y) = max((y-alpha)/(1-alpha), 0)")
CENSOR_UPPER = DistortionFamily(Kind.CENSOR_UPPER, 1.0, "upper censoring, h(y) = min(y/alpha, 1)")
SKEWING = DistortionFamily(Kind.SKEWING, 0.0, "skewing, f_alpha(x) = 2 f(x) F(alpha x)")

FAMILIES = {f.name: f for f in (POWER_CDF, POWER_SURVIVAL, CENSOR_LOWER, CENSOR_UPPER, SKEWING)}


def family_from_name(name):
    key = str(name).strip().lower().replace("_", "-")
    try:
        return FAMILIES[key]
    except KeyError:
        raise UnsupportedKindError(f"unknown distortion family {name!r}; choose from {sorted(FAMILIES)}") from None


def distort_cdf(family, alpha, u):
    """Evaluate h_alpha(u). Works elementwise on arrays."""
    if family.kind is Kind.SKEWING:
        raise UnsupportedKindError("the skewing distortion depends on the model; it has no closed-form h")
    if not family.admissible(alpha):
        raise DomainError(f"alpha={alpha} is not admissible for {family.name}")
    y = np.asarray(u, dtype=float)
    if np.any(~((y >= 0.0) & (y <= 1.0))):
        raise DomainError("distort_cdf expects u in [0, 1]")
    alpha = float(alpha)
    if alpha == family.alpha0:
        out = y.copy()
    elif family.kind is Kind.POWER_CDF:
        out = y ** alpha
    elif family.kind is Kind.POWER_SURVIVAL:
        out = 1.0 - (1.0 - y) ** alpha
    elif family.kind is Kind.CENSOR_LOWER:
        out = np.maximum((y - alpha) / (1.0 - alpha), 0.0)
    else:
        out = np.minimum(y / alpha, 1.0)
    return out if out.ndim else float(out)


def log_h_prime(family, alpha, u):
    """log of the derivative of h_alpha at u.

    alpha may leave the admissible range on the side away from the family
    (``alpha < 1`` for the power families, for instance): the formula is the
    analytic continuation used by two-sided finite differences.
    """
    if family.kind is Kind.SKEWING:
        raise UnsupportedKindError("log h' of the skewing distortion needs the model CDF")
    y = np.asarray(u, dtype=float)
    alpha = float(alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        if family.kind is Kind.POWER_CDF:
            out = math.log(alpha) + (alpha - 1.0) * np.log(y)
        elif family.kind is Kind.POWER_SURVIVAL:
            out = math.log(alpha) + (alpha - 1.0) * np.log1p(-y)
        elif family.kind is Kind.CENSOR_LOWER:
            out = np.where(y > alpha, -math.log1p(-alpha), -np.inf)
        else:
            out = np.where(y < alpha, -math.log(alpha), -np.inf)
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class ScoreContext:
    model: object
    theta: np.ndarray
    observation: float


def _scalar_observation(x):
    arr = np.asarray(x, dtype=float)
    if arr.size != 1:
        raise ModelContractError("scores are defined for scalar observations only")
    return float(arr.reshape(-1)[0])


def score(family, ctx):
    """Per-observation score d/d alpha log h'_alpha(F(x | theta)) at alpha0."""
    model, theta = ctx.model, ctx.theta
    x = _scalar_observation(ctx.observation)
    kind = family.kind
    if kind is Kind.CENSOR_LOWER:
        return 1.0
    if kind is Kind.CENSOR_UPPER:
        return -1.0
    if kind is Kind.SKEWING:
        if not model.symmetric_about_zero:
            raise ModelContractError(f"skewing needs a model symmetric about 0, got {model!r}")
        return float(2.0 * model.pdf(theta, 0.0) * x)
    if kind is Kind.POWER_CDF:
        lv = float(model.log_cdf(theta, x))
        what = "F"
    else:
        lv = float(model.log_survival(theta, x))
        what = "S"
    if not math.isfinite(lv):
        raise ScoreUndefinedError(f"{what}(x={x} | theta={np.asarray(theta).tolist()}) = 0; score undefined")
    return 1.0 + lv


def _check_skewing(family, model, data_values):
    if family.kind is Kind.SKEWING and not model.symmetric_about_zero:
        raise ModelContractError(f"skewing needs a model symmetric about 0, got {model!r}")


def score_sum(family, model, theta, data):
    """Sum of per-observation scores over a dataset for one parameter vector."""
    t = model.check_theta(theta)
    if t.ndim != 1:
        raise ModelContractError("score_sum takes a single parameter vector; use score_sum_draws for matrices")
    return float(score_sum_draws(family, model, t[None, :], data)[0])


def score_sum_draws(family, model, draws, data):
    """Score sums T(theta^(m)) for every row of a draw matrix."""
    values = data.values if hasattr(data, "values") else np.asarray(data, dtype=float)
    _check_skewing(family, model, values)
    params = np.ascontiguousarray(model.slots(draws), dtype=float)
    x = np.ascontiguousarray(values, dtype=float)
    totals, bad_m, bad_i = kernels.score_totals(family.code, model.code, params, x)
    if bad_m >= 0:
        what = "F" if family.kind is Kind.POWER_CDF else "S"
        raise ScoreUndefinedError(
            f"{what}(x[{bad_i}]={x[bad_i]} | draw {bad_m}) = 0; score undefined for {family.name}",
            observation=int(bad_i),
            draw=int(bad_m),
        )
    return totals


def _as_prior(prior):
    if isinstance(prior, Frozen):
        return Prior((prior,))
    return prior


def _component_symmetric(comp):
    if comp.model.name == "normal" and comp.model.mu is None:
        return comp.params[0] == 0.0
    return comp.model.symmetric_about_zero


def prior_score(family, prior, theta):
    """Score of a prior distortion at theta.

    The prior is a product of independent components; each component is
    distorted by the same h_alpha, so the score is the sum of the
    component scores. For one component this is 1 + log F(theta) under
    ``power-cdf``.
    """
    prior = _as_prior(prior)
    t = prior.check_dim(theta)
    total = np.zeros(t.shape[:-1])
    kind = family.kind
    for j, comp in enumerate(prior.components):
        tj = t[..., j]
        if kind is Kind.CENSOR_LOWER:
            total = total + 1.0
        elif kind is Kind.CENSOR_UPPER:
            total = total - 1.0
        elif kind is Kind.SKEWING:
            if not _component_symmetric(comp):
                raise ModelContractError(f"skewing needs prior components symmetric about 0, got {comp.describe()}")
            total = total + 2.0 * np.exp(comp.log_pdf(0.0)) * tj
        else:
            lv = comp.log_cdf(tj) if kind is Kind.POWER_CDF else comp.log_survival(tj)
            bad = ~np.isfinite(lv)
            if np.any(bad):
                idx = int(np.flatnonzero(np.atleast_1d(bad))[0])
                raise ScoreUndefinedError(
                    f"prior component {j} ({comp.describe()}) has zero {'CDF' if kind is Kind.POWER_CDF else 'survival'}"
                    f" at the parameter value; score undefined",
                    draw=idx if t.ndim == 2 else None,
                )
            total = total + 1.0 + lv
    return float(total) if t.ndim == 1 else total


def likelihood_log_weights(family, alpha, model, draws, data):
    """sum_i log h'_alpha(F(x_i | theta)) for each draw."""
    values = data.values if hasattr(data, "values") else np.asarray(data, dtype=float)
    _check_skewing(family, model, values)
    params = np.ascontiguousarray(model.slots(draws), dtype=float)
    x = np.ascontiguousarray(values, dtype=float)
    return kernels.log_weight_totals(family.code, float(alpha), model.code, params, x)


def prior_log_weights(family, alpha, prior, draws):
    """sum_j log h'_alpha(F_j(theta_j)) for each draw."""
    prior = _as_prior(prior)
    t = prior.check_dim(draws)
    total = np.zeros(t.shape[:-1])
    for j, comp in enumerate(prior.components):
        p = comp.model.slots(comp.params)
        tj = t[..., j]
        if family.kind is Kind.SKEWING:
            if not _component_symmetric(comp):
                raise ModelContractError(f"skewing needs prior components symmetric about 0, got {comp.describe()}")
            total = total + math.log(2.0) + _kernels_np.logcdf(comp.model.code, p[0], p[1], alpha * tj)
        elif family.kind in (Kind.POWER_CDF, Kind.POWER_SURVIVAL):
            lv = comp.log_cdf(tj) if family.kind is Kind.POWER_CDF else comp.log_survival(tj)
            with np.errstate(divide="ignore", invalid="ignore"):
                total = total + math.log(alpha) + (alpha - 1.0) * lv
        else:
            total = total + log_h_prime(family, alpha, comp.cdf(tj))
    return total
