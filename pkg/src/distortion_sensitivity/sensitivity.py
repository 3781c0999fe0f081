"""Local sensitivity estimates from posterior draws.

The sensitivity of E[g(theta)] to a distortion at its identity point equals
the posterior covariance between g(theta) and a score total T(theta), so it
can be read off ordinary posterior draws:

* likelihood mode: T = sum_i score(x_i | theta)
* prior mode: T = prior score at theta
* double mode: the sum of both

The estimate is reported with its Cauchy-Schwarz bound sd(g) * sd(T), the
ratio of the two (a correlation), a batch-means Monte Carlo standard error
and, for the exponential model under survival power distortion, an
asymptotic normal interval.
"""
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from scipy import special

from .distortion import (
    DistortionFamily,
    Kind,
    Mode,
    mode_from_name,
    prior_score,
    score_sum_draws,
)
from .errors import DomainError, InsufficientSampleError, ModelContractError, UnsupportedKindError
from .models import Exponential
from .posterior import distorted_expectation_reweighted, evaluate_g


class GKind(str, Enum):
    IDENTITY = "identity"
    COMPONENT = "component"
    CREDIBLE_SET = "credible-set"


@dataclass(frozen=True)
class GFunction:
    """Function of the parameter whose posterior expectation is perturbed.

    ``component`` is 1-based. ``credible_set(gamma)`` is the indicator that a
    parameter lies in the equal-tailed (1 - gamma) credible interval built
    from the same draws; it acts on every component unless one is named.
    """

    kind: GKind = GKind.IDENTITY
    index: Optional[int] = None
    gamma: Optional[float] = None

    @classmethod
    def identity(cls):
        return cls(GKind.IDENTITY)

    @classmethod
    def component(cls, j):
        if int(j) < 1:
            raise ModelContractError("component index is 1-based")
        return cls(GKind.COMPONENT, index=int(j))

    @classmethod
    def credible_set(cls, gamma, component=None):
        if not 0.0 < gamma < 1.0:
            raise DomainError("gamma must lie in (0, 1)")
        return cls(GKind.CREDIBLE_SET, index=component, gamma=float(gamma))

    def _columns(self, k):
        if self.index is None:
            return list(range(k))
        if not 1 <= self.index <= k:
            raise ModelContractError(f"component {self.index} out of range for a {k}-parameter model")
        return [self.index - 1]

    def output_dim(self, k):
        return len(self._columns(k))

    def evaluate(self, theta):
        t = np.asarray(theta, dtype=float)
        if t.ndim == 1:
            t = t[:, None]
        cols = self._columns(t.shape[1])
        sub = t[:, cols]
        if self.kind is GKind.CREDIBLE_SET:
            lo = np.quantile(sub, self.gamma / 2.0, axis=0)
            hi = np.quantile(sub, 1.0 - self.gamma / 2.0, axis=0)
            return ((sub >= lo) & (sub <= hi)).astype(float)
        return sub.copy()

    def labels(self, param_names):
        names = [param_names[j] for j in self._columns(len(param_names))]
        if self.kind is GKind.CREDIBLE_SET:
            return [f"1{{{n} in CI{1 - self.gamma:g}}}" for n in names]
        return names

    def describe(self):
        if self.kind is GKind.IDENTITY:
            return "identity"
        if self.kind is GKind.COMPONENT:
            return f"component:{self.index}"
        return f"credible-set:{self.gamma:g}" + ("" if self.index is None else f":{self.index}")


def g_from_name(text):
    """Parse ``identity``, ``component:J`` or ``credible-set:GAMMA[:J]``."""
    parts = str(text).strip().lower().split(":")
    if parts[0] == "identity":
        return GFunction.identity()
    if parts[0] == "component" and len(parts) == 2:
        return GFunction.component(int(parts[1]))
    if parts[0] in ("credible-set", "credible") and len(parts) in (2, 3):
        comp = int(parts[2]) if len(parts) == 3 else None
        return GFunction.credible_set(float(parts[1]), comp)
    raise ModelContractError(f"cannot parse g-function {text!r}")


class Interval(NamedTuple):
    lo: float
    hi: float

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, value):
        return self.lo <= value <= self.hi


def _jsonable(v):
    if v is None:
        return None
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(u) for u in v]
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass(frozen=True, eq=False)
class SensitivityReport:
    delta: np.ndarray
    delta_normalized: np.ndarray
    cs_bound: np.ndarray
    std_error: np.ndarray
    ci_95: Optional[list]
    mode: Mode
    family: object
    M: int
    n: int
    seed: Optional[int] = None
    labels: tuple = ()
    normalized_defined: tuple = ()
    extra: dict = field(default_factory=dict)

    @property
    def delta_norm(self):
        return float(np.linalg.norm(self.delta))

    def to_dict(self):
        return {
            "mode": self.mode.value,
            "family": self.family.name,
            "delta": _jsonable(self.delta),
            "delta_normalized": _jsonable(self.delta_normalized),
            "cs_bound": _jsonable(self.cs_bound),
            "std_error": _jsonable(self.std_error),
            "ci_95": None if self.ci_95 is None else [_jsonable(list(c)) if c is not None else None for c in self.ci_95],
            "M": self.M,
            "n": self.n,
            "seed": self.seed,
            "labels": list(self.labels),
            "normalized_defined": list(self.normalized_defined),
            "delta_norm": _jsonable(self.delta_norm),
            **self.extra,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    CSV_FIELDS = ("mode", "family", "component", "delta", "delta_normalized", "cs_bound",
                  "std_error", "ci_lo", "ci_hi", "M", "n", "seed")

    def csv_rows(self):
        rows = []
        for j in range(len(self.delta)):
            ci = self.ci_95[j] if self.ci_95 is not None else None
            rows.append({
                "mode": self.mode.value,
                "family": self.family.name,
                "component": self.labels[j] if self.labels else str(j + 1),
                "delta": _fmt(self.delta[j]),
                "delta_normalized": _fmt(self.delta_normalized[j]),
                "cs_bound": _fmt(self.cs_bound[j]),
                "std_error": _fmt(self.std_error[j]),
                "ci_lo": _fmt(ci[0]) if ci is not None else "",
                "ci_hi": _fmt(ci[1]) if ci is not None else "",
                "M": self.M,
                "n": self.n,
                "seed": "" if self.seed is None else self.seed,
            })
        return rows


def _fmt(v):
    v = float(v)
    return repr(v) if math.isfinite(v) else ""


def mc_standard_error(g_values, t_values, n_batches=20):
    """Batch-means standard error of the sample covariance of g and t.

    The covariance is linearised around the full-sample means; the batch
    means of the resulting products absorb autocorrelation in sampler output.
    """
    g = np.asarray(g_values, dtype=float).ravel()
    t = np.asarray(t_values, dtype=float).ravel()
    if g.shape != t.shape:
        raise ModelContractError("g and t must have the same length")
    M = g.shape[0]
    if M < 20:
        raise InsufficientSampleError(f"batch-means standard error needs M >= 20, got {M}")
    if n_batches < 2 or n_batches > M:
        raise ModelContractError("n_batches must lie in [2, M]")
    psi = (g - g.mean()) * (t - t.mean())
    b = M // n_batches
    means = psi[: b * n_batches].reshape(n_batches, b).mean(axis=1)
    spread = means - means.mean()
    if not np.any(spread):
        return 0.0
    return float(np.sqrt(np.sum(spread * spread) / (n_batches - 1) / n_batches))


def clt_interval(delta_hat, theta_hat, n, level=0.95):
    """Asymptotic interval delta_hat +/- z * theta_hat / sqrt(n).

    This is the normal limit for the exponential model under survival power
    distortion with g the rate, whose asymptotic variance is theta0 ** 2;
    ``theta_hat`` is a plug-in estimate of theta0.
    """
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie in (0, 1)")
    if n < 1:
        raise DomainError("n must be >= 1")
    z = float(special.ndtri(0.5 + level / 2.0))
    half = z * abs(float(theta_hat)) / math.sqrt(n)
    return Interval(float(delta_hat) - half, float(delta_hat) + half)


def clt_available(model, family, mode, g):
    return (
        isinstance(model, Exponential)
        and family.kind is Kind.POWER_SURVIVAL
        and mode_from_name(mode) is Mode.LIKELIHOOD
        and g.kind in (GKind.IDENTITY, GKind.COMPONENT)
    )


def score_totals(draws, model, prior, data, family, mode):
    """T(theta^(m)) for every draw under the given mode."""
    mode = mode_from_name(mode)
    theta = draws.draws
    if mode is Mode.LIKELIHOOD:
        return score_sum_draws(family, model, theta, data)
    if prior is None:
        raise ModelContractError(f"{mode.value} sensitivity needs the prior")
    ps = np.asarray(prior_score(family, prior, theta), dtype=float)
    if mode is Mode.PRIOR:
        return ps
    return ps + score_sum_draws(family, model, theta, data)


def covariance_summary(G, T):
    """Sample covariance (1/(M-1)), Cauchy-Schwarz bound and correlation."""
    M = G.shape[0]
    gc = G - G.mean(axis=0)
    tc = T - T.mean()
    delta = gc.T @ tc / (M - 1)
    sd_g = np.sqrt(np.sum(gc * gc, axis=0) / (M - 1))
    sd_t = math.sqrt(float(tc @ tc) / (M - 1))
    bound = sd_g * sd_t
    defined = bound > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(defined, delta / np.where(defined, bound, 1.0), np.nan)
    corr = np.where(defined, np.clip(corr, -1.0, 1.0), np.nan)
    return delta, bound, corr, defined


def estimate_delta(draws, model, prior, data, family, g=None, mode=Mode.LIKELIHOOD, n_batches=20):
    """Estimate the local sensitivity of E[g] to ``family`` from posterior draws."""
    if not isinstance(family, DistortionFamily):
        raise UnsupportedKindError(f"not a distortion family: {family!r}")
    g = g or GFunction.identity()
    mode = mode_from_name(mode)
    if draws.M < 2:
        raise InsufficientSampleError("need at least two draws")
    T = score_totals(draws, model, prior, data, family, mode)
    G = evaluate_g(g, draws.draws)
    delta, bound, corr, defined = covariance_summary(G, T)

    if draws.M >= 20:
        se = np.array([mc_standard_error(G[:, j], T, n_batches) for j in range(G.shape[1])])
    else:
        se = np.full(G.shape[1], np.nan)

    ci = None
    if clt_available(model, family, mode, g):
        theta_hat = float(draws.draws[:, 0].mean())
        ci = [clt_interval(d, theta_hat, data.n, 0.95) for d in delta]

    names = draws.param_names or model.param_names
    return SensitivityReport(
        delta=delta,
        delta_normalized=corr,
        cs_bound=bound,
        std_error=se,
        ci_95=ci,
        mode=mode,
        family=family,
        M=draws.M,
        n=data.n,
        seed=draws.seed,
        labels=tuple(g.labels(tuple(names))),
        normalized_defined=tuple(bool(d) for d in defined),
    )


class FiniteDifferenceCheck(NamedTuple):
    delta_fd: np.ndarray
    delta_cov: np.ndarray


def finite_difference_check(draws, model, data, family, g=None, epsilon=1e-4, prior=None, mode=Mode.LIKELIHOOD):
    """Central difference of reweighted distorted expectations at alpha0.

    Both sides reuse the same draws, so the difference isolates the
    derivative; ``delta_cov`` is the covariance estimate from the same draws.
    """
    if not 1e-6 <= epsilon <= 1e-2:
        raise DomainError("epsilon must lie in [1e-6, 1e-2]")
    g = g or GFunction.identity()
    a0 = family.alpha0
    up = distorted_expectation_reweighted(draws, model, data, family, a0 + epsilon, g, prior=prior, mode=mode)
    down = distorted_expectation_reweighted(draws, model, data, family, a0 - epsilon, g, prior=prior, mode=mode)
    fd = (up - down) / (2.0 * epsilon)
    cov = estimate_delta(draws, model, prior, data, family, g, mode).delta
    return FiniteDifferenceCheck(np.atleast_1d(fd), cov)
