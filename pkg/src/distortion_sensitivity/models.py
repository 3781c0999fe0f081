"""Parametric likelihood families, independent-component priors and datasets.

Every family takes a parameter vector ``theta`` of length ``k``. Passing a
matrix of shape ``(M, k)`` together with a 1-D ``x`` evaluates all draws at
once and returns an ``(M, n)`` array. Rates, shapes and scales must be
strictly positive.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import _codes
from . import _kernels_np as K
from .errors import DomainError, ModelContractError


@dataclass(frozen=True, eq=False)
class Dataset:
    """Observed sample with a free-text unit label and a source tag."""

    values: np.ndarray
    source: str = ""
    units: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            bad = np.flatnonzero(~np.isfinite(v)).tolist()
            raise DomainError(f"dataset contains non-finite values at positions {bad}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return int(self.values.shape[0])

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Dataset(n={self.n}, source={self.source!r}, units={self.units!r})"


class ParametricModel:
    """Base class; subclasses fill in the code, names and positivity mask."""

    name = ""
    code = -1
    param_names = ()
    positive = ()
    symmetric_about_zero = False
    support_lower = -np.inf

    @property
    def k(self):
        return len(self.param_names)

    def __repr__(self):
        return f"{type(self).__name__}()"

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))

    def check_theta(self, theta):
        t = np.asarray(theta, dtype=float)
        if t.ndim == 0:
            t = t.reshape(1)
        if t.shape[-1] != self.k:
            raise ModelContractError(
                f"{self.name} expects {self.k} parameter(s) {self.param_names}, got shape {t.shape}"
            )
        if not np.all(np.isfinite(t)):
            raise DomainError(f"{self.name}: non-finite parameter value")
        pos = np.asarray(self.positive, dtype=bool)
        if np.any(t[..., pos] <= 0.0):
            raise DomainError(f"{self.name}: parameters {self.param_names} must be positive where required")
        return t

    def slots(self, theta):
        """Map parameter vectors to the two kernel slots, shape ``(..., 2)``."""
        t = self.check_theta(theta)
        out = np.zeros(t.shape[:-1] + (2,))
        out[..., : self.k] = t
        return out

    def kernel_slots(self):
        """(source index or -1, fixed value) per slot, for the compiled kernels."""
        src = np.array([0, 1 if self.k > 1 else -1], dtype=np.int64)
        return src, np.zeros(2)

    def _split(self, theta, x):
        p = self.slots(theta)
        x = np.asarray(x, dtype=float)
        if p.ndim == 2:
            return p[:, 0, None], p[:, 1, None], x.reshape(1, -1)
        return p[0], p[1], x

    def log_pdf(self, theta, x):
        p0, p1, x = self._split(theta, x)
        return K.logpdf(self.code, p0, p1, x)

    def pdf(self, theta, x):
        return np.exp(self.log_pdf(theta, x))

    def cdf(self, theta, x):
        p0, p1, x = self._split(theta, x)
        return K.cdf(self.code, p0, p1, x)

    def survival(self, theta, x):
        p0, p1, x = self._split(theta, x)
        return K.survival(self.code, p0, p1, x)

    def log_cdf(self, theta, x):
        p0, p1, x = self._split(theta, x)
        return K.logcdf(self.code, p0, p1, x)

    def log_survival(self, theta, x):
        p0, p1, x = self._split(theta, x)
        return K.logsf(self.code, p0, p1, x)

    def quantile(self, theta, u):
        raise NotImplementedError

    def simulate(self, theta, n, seed):
        """Draw ``n`` i.i.d. observations; deterministic given ``seed``."""
        if int(n) < 1:
            raise DomainError("simulate needs n >= 1")
        t = self.check_theta(theta)
        rng = np.random.default_rng(seed)
        values = self._draw(rng, t, int(n))
        return Dataset(values, source=f"simulated:{self.name}{tuple(float(v) for v in t)}:seed={seed}")

    def _draw(self, rng, theta, n):
        raise NotImplementedError

    def initial_guess(self, x):
        """Moment-based starting point for samplers."""
        raise NotImplementedError

    def check_support(self, x):
        """Indices of observations outside the open support of the family."""
        x = np.asarray(x, dtype=float)
        if not np.isfinite(self.support_lower):
            return np.array([], dtype=int)
        return np.flatnonzero(x <= self.support_lower)


class Exponential(ParametricModel):
    name = "exponential"
    code = _codes.EXPONENTIAL
    param_names = ("rate",)
    positive = (True,)
    support_lower = 0.0

    def quantile(self, theta, u):
        p0, _, u = self._split(theta, u)
        return -np.log1p(-u) / p0

    def _draw(self, rng, theta, n):
        return rng.exponential(1.0 / theta[0], n)

    def initial_guess(self, x):
        return np.array([1.0 / np.mean(x)])


class Gamma(ParametricModel):
    """Gamma(shape, rate); density rate^shape x^(shape-1) e^(-rate x) / Gamma(shape)."""

    name = "gamma"
    code = _codes.GAMMA
    param_names = ("shape", "rate")
    positive = (True, True)
    support_lower = 0.0

    def quantile(self, theta, u):
        p0, p1, u = self._split(theta, u)
        return special.gammaincinv(p0, u) / p1

    def _draw(self, rng, theta, n):
        return rng.gamma(theta[0], 1.0 / theta[1], n)

    def initial_guess(self, x):
        m, v = np.mean(x), np.var(x)
        if not v > 0:
            return np.array([1.0, 1.0 / m])
        return np.array([m * m / v, m / v])


class LogNormal(ParametricModel):
    name = "lognormal"
    code = _codes.LOGNORMAL
    param_names = ("mu", "sigma")
    positive = (False, True)
    support_lower = 0.0

    def quantile(self, theta, u):
        p0, p1, u = self._split(theta, u)
        return np.exp(p0 + p1 * special.ndtri(u))

    def _draw(self, rng, theta, n):
        return rng.lognormal(theta[0], theta[1], n)

    def initial_guess(self, x):
        lx = np.log(x)
        s = np.std(lx)
        return np.array([np.mean(lx), s if s > 0 else 1.0])


class Normal(ParametricModel):
    """Normal(mu, sigma). With ``mu`` fixed the only free parameter is sigma."""

    name = "normal"
    code = _codes.NORMAL

    def __init__(self, mu=None):
        self.mu = None if mu is None else float(mu)

    def __repr__(self):
        return "Normal()" if self.mu is None else f"Normal(mu={self.mu})"

    @property
    def param_names(self):
        return ("mu", "sigma") if self.mu is None else ("sigma",)

    @property
    def positive(self):
        return (False, True) if self.mu is None else (True,)

    @property
    def symmetric_about_zero(self):
        return self.mu == 0.0

    def slots(self, theta):
        t = self.check_theta(theta)
        if self.mu is None:
            return t.copy()
        out = np.empty(t.shape[:-1] + (2,))
        out[..., 0] = self.mu
        out[..., 1] = t[..., 0]
        return out

    def kernel_slots(self):
        if self.mu is None:
            return np.array([0, 1], dtype=np.int64), np.zeros(2)
        return np.array([-1, 0], dtype=np.int64), np.array([self.mu, 0.0])

    def quantile(self, theta, u):
        p0, p1, u = self._split(theta, u)
        return p0 + p1 * special.ndtri(u)

    def _draw(self, rng, theta, n):
        if self.mu is None:
            return rng.normal(theta[0], theta[1], n)
        return rng.normal(self.mu, theta[0], n)

    def initial_guess(self, x):
        if self.mu is None:
            s = np.std(x)
            return np.array([np.mean(x), s if s > 0 else 1.0])
        s = np.sqrt(np.mean((np.asarray(x) - self.mu) ** 2))
        return np.array([s if s > 0 else 1.0])


MODEL_REGISTRY = {
    "exponential": Exponential,
    "gamma": Gamma,
    "lognormal": LogNormal,
    "normal": Normal,
}


def model_from_name(name, **kwargs):
    key = name.strip().lower().replace("-", "").replace("_", "")
    try:
        cls = MODEL_REGISTRY[key]
    except KeyError:
        raise ModelContractError(f"unknown model family {name!r}; choose from {sorted(MODEL_REGISTRY)}") from None
    return cls(**kwargs)


@dataclass(frozen=True, eq=False)
class Frozen:
    """A univariate distribution with its parameters fixed."""

    model: ParametricModel
    params: tuple

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in np.atleast_1d(self.params)))
        self.model.check_theta(self.params)

    def log_pdf(self, x):
        return self.model.log_pdf(self.params, x)

    def cdf(self, x):
        return self.model.cdf(self.params, x)

    def survival(self, x):
        return self.model.survival(self.params, x)

    def log_cdf(self, x):
        return self.model.log_cdf(self.params, x)

    def log_survival(self, x):
        return self.model.log_survival(self.params, x)

    def describe(self):
        return f"{self.model.name}{self.params}"


@dataclass(frozen=True, eq=False)
class Prior:
    """Product of independent univariate priors, one per model parameter."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def k(self):
        return len(self.components)

    def check_dim(self, theta):
        t = np.asarray(theta, dtype=float)
        if t.ndim == 0:
            t = t.reshape(1)
        if t.shape[-1] != self.k:
            raise ModelContractError(f"prior has {self.k} component(s), parameter has shape {t.shape}")
        return t

    def log_pdf(self, theta):
        t = self.check_dim(theta)
        return sum(c.log_pdf(t[..., j]) for j, c in enumerate(self.components))

    def kernel_arrays(self):
        codes = np.array([c.model.code for c in self.components], dtype=np.int64)
        params = np.array([c.model.slots(c.params) for c in self.components], dtype=float).reshape(self.k, 2)
        return codes, params

    def describe(self):
        return [c.describe() for c in self.components]


def prior_cdf(prior, theta):
    """Componentwise prior CDF values; shape matches ``theta``."""
    if isinstance(prior, Frozen):
        prior = Prior((prior,))
    t = prior.check_dim(theta)
    out = np.empty_like(t)
    for j, c in enumerate(prior.components):
        out[..., j] = c.cdf(t[..., j])
    return out


def gamma_prior(shape, rate):
    return Frozen(Gamma(), (shape, rate))


def normal_prior(mu, sigma):
    return Frozen(Normal(), (mu, sigma))


def default_prior(model):
    """Weakly informative priors used when a config does not give one."""
    if isinstance(model, Exponential):
        return Prior((gamma_prior(1.0, 1.0),))
    if isinstance(model, Gamma):
        return Prior((gamma_prior(2.0, 1.0), gamma_prior(2.0, 1.0)))
    if isinstance(model, LogNormal):
        return Prior((normal_prior(0.0, 10.0), gamma_prior(2.0, 1.0)))
    if isinstance(model, Normal):
        if model.mu is None:
            return Prior((normal_prior(0.0, 10.0), gamma_prior(2.0, 1.0)))
        return Prior((gamma_prior(2.0, 1.0),))
    raise ModelContractError(f"no default prior for {model!r}")
