"""Draws from the non-distorted posterior and reweighted distorted expectations.

The exponential model with a single Gamma prior is sampled exactly from its
conjugate posterior. Every other model/prior pair goes through a
componentwise random-walk Metropolis sampler that works on log-transformed
positive parameters and tunes its step sizes during burn-in only.
"""
import csv
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels_np
from . import kernels
from .distortion import Mode, likelihood_log_weights, mode_from_name, prior_log_weights
from .errors import (
    DegenerateWeightsError,
    DomainError,
    InitializationError,
    InsufficientSampleError,
    LowEffectiveSampleWarning,
    ModelContractError,
    SamplerDiagnosticWarning,
)
from .models import Exponential, Frozen, Gamma, Prior


class Sampler(str, Enum):
    CONJUGATE = "conjugate-gamma-exponential"
    METROPOLIS = "random-walk-metropolis"


@dataclass(frozen=True)
class SamplerConfig:
    method: str = "auto"
    burn_in: int = 5000
    thinning: int = 1
    chain_count: int = 1
    target_accept: float = 0.35
    adapt_every: int = 50
    step_sizes: tuple = None
    init: tuple = None

    def __post_init__(self):
        if self.method not in ("auto", "conjugate", "metropolis"):
            raise ModelContractError(f"unknown sampler method {self.method!r}")
        if self.burn_in < 0 or self.thinning < 1 or self.chain_count < 1 or self.adapt_every < 1:
            raise ModelContractError("burn_in >= 0, thinning >= 1, chain_count >= 1 and adapt_every >= 1 required")
        if not 0.0 < self.target_accept < 1.0:
            raise ModelContractError("target_accept must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class PosteriorDraws:
    """Posterior draws (one row per draw) plus the metadata to reproduce them."""

    draws: np.ndarray
    seed: int
    sampler: Sampler
    chain_count: int = 1
    acceptance_rate: float = None
    burn_in: int = 0
    thinning: int = 1
    param_names: tuple = ()
    chain_index: np.ndarray = None
    step_sizes: tuple = None
    warnings: tuple = field(default_factory=tuple)

    def __post_init__(self):
        d = np.array(self.draws, dtype=float)
        if d.ndim == 1:
            d = d[:, None]
        if d.ndim != 2 or d.shape[0] < 2:
            raise InsufficientSampleError("PosteriorDraws needs an (M, k) matrix with M >= 2")
        if not np.all(np.isfinite(d)):
            raise DomainError("posterior draws must be finite")
        if self.acceptance_rate is not None and not 0.0 <= self.acceptance_rate <= 1.0:
            raise DomainError("acceptance_rate must lie in [0, 1]")
        d.setflags(write=False)
        object.__setattr__(self, "draws", d)
        if self.chain_index is not None:
            ci = np.asarray(self.chain_index, dtype=np.int64)
            ci.setflags(write=False)
            object.__setattr__(self, "chain_index", ci)
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def M(self):
        return int(self.draws.shape[0])

    @property
    def k(self):
        return int(self.draws.shape[1])

    def metadata(self):
        return {
            "M": self.M,
            "seed": self.seed,
            "sampler": self.sampler.value,
            "chain_count": self.chain_count,
            "acceptance_rate": self.acceptance_rate,
            "burn_in": self.burn_in,
            "thinning": self.thinning,
            "warnings": list(self.warnings),
        }

    def to_csv(self, path):
        names = list(self.param_names) or [f"theta{j + 1}" for j in range(self.k)]
        chains = self.chain_index if self.chain_index is not None else np.zeros(self.M, dtype=np.int64)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["draw", "chain"] + names)
            for m in range(self.M):
                w.writerow([m, int(chains[m])] + [repr(float(v)) for v in self.draws[m]])


@dataclass(frozen=True)
class ConjugatePosterior:
    """Gamma(a_post, b_post) posterior (shape, rate) of the exponential rate."""

    a_post: float
    b_post: float

    @property
    def mean(self):
        return self.a_post / self.b_post

    @property
    def var(self):
        return self.a_post / self.b_post ** 2

    def as_frozen(self):
        return Frozen(Gamma(), (self.a_post, self.b_post))

    def sample(self, size, rng):
        return rng.gamma(self.a_post, 1.0 / self.b_post, size)


def conjugate_gamma_exponential(a, b, data, alpha=1.0):
    """Posterior of an exponential rate under a Gamma(a, b) prior.

    With the survival power distortion at level ``alpha`` the distorted
    likelihood stays exponential in form, so the posterior is
    Gamma(a + n, b + alpha * sum(x)); ``alpha = 1`` is the ordinary posterior.
    """
    if not (a > 0 and b > 0):
        raise DomainError("Gamma prior hyperparameters must be positive")
    if not alpha >= 1.0:
        raise DomainError("alpha must be >= 1")
    x = data.values if hasattr(data, "values") else np.asarray(data, dtype=float)
    return ConjugatePosterior(float(a) + x.shape[0], float(b) + float(alpha) * float(np.sum(x)))


def _as_prior(prior):
    return Prior((prior,)) if isinstance(prior, Frozen) else prior


def conjugate_available(model, prior):
    prior = _as_prior(prior)
    return (
        isinstance(model, Exponential)
        and prior.k == 1
        and isinstance(prior.components[0].model, Gamma)
    )


def chain_rng(seed, chain):
    """Independent generator for one chain, split from the master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chain,)))


def _chain_sizes(M, chains):
    base, extra = divmod(M, chains)
    return [base + (1 if c < extra else 0) for c in range(chains)]


def sample_posterior(model, prior, data, M, seed, sampler_config=None):
    """Draw M parameter vectors from the posterior of ``model`` given ``data``."""
    cfg = sampler_config or SamplerConfig()
    prior = _as_prior(prior)
    M = int(M)
    if M < 2:
        raise InsufficientSampleError("M must be at least 2")
    if data.n < 1:
        raise InsufficientSampleError("posterior sampling needs at least one observation")
    if prior.k != model.k:
        raise ModelContractError(f"{model!r} has {model.k} parameter(s) but the prior has {prior.k}")
    if cfg.chain_count > M:
        raise ModelContractError("chain_count cannot exceed M")

    method = cfg.method
    if method == "auto":
        method = "conjugate" if conjugate_available(model, prior) else "metropolis"
    if method == "conjugate":
        if not conjugate_available(model, prior):
            raise ModelContractError("conjugate sampling needs an exponential model with one Gamma prior")
        return _sample_conjugate(prior, data, M, seed, cfg, model)
    return _sample_metropolis(model, prior, data, M, seed, cfg)


def _sample_conjugate(prior, data, M, seed, cfg, model):
    a, b = prior.components[0].params
    post = conjugate_gamma_exponential(a, b, data, 1.0)
    blocks, chains = [], []
    for c, size in enumerate(_chain_sizes(M, cfg.chain_count)):
        blocks.append(post.sample(size, chain_rng(seed, c)))
        chains.append(np.full(size, c))
    return PosteriorDraws(
        draws=np.concatenate(blocks)[:, None],
        seed=seed,
        sampler=Sampler.CONJUGATE,
        chain_count=cfg.chain_count,
        burn_in=0,
        thinning=1,
        param_names=model.param_names,
        chain_index=np.concatenate(chains),
    )


def _to_unconstrained(theta, positive):
    return np.where(positive, np.log(np.where(positive, theta, 1.0)), theta)


def _sample_metropolis(model, prior, data, M, seed, cfg):
    x = np.ascontiguousarray(data.values, dtype=float)
    k = model.k
    positive = np.array(model.positive, dtype=np.bool_)
    slot_src, slot_val = model.kernel_slots()
    prior_codes, prior_params = prior.kernel_arrays()

    init = np.asarray(cfg.init if cfg.init is not None else model.initial_guess(x), dtype=float).reshape(k)
    if np.any(init[positive] <= 0) or not np.all(np.isfinite(init)):
        raise InitializationError(f"initial point {init.tolist()} is outside the parameter domain")
    u0 = _to_unconstrained(init, positive)
    lt0 = _kernels_np.log_target(u0, model.code, slot_src, slot_val, x, prior_codes, prior_params, positive)
    if not math.isfinite(lt0):
        raise InitializationError(f"log-posterior is not finite at the initial point {init.tolist()}")

    if cfg.step_sizes is not None:
        step0 = np.asarray(cfg.step_sizes, dtype=float).reshape(k)
    else:
        scale = np.where(positive, 1.0, np.maximum(np.abs(u0), 1.0))
        step0 = 2.0 * scale / math.sqrt(x.shape[0] + 1.0)

    blocks, chains, warn = [], [], []
    n_acc = n_prop = 0
    step = step0
    for c, size in enumerate(_chain_sizes(M, cfg.chain_count)):
        rng = chain_rng(seed, c)
        total = cfg.burn_in + size * cfg.thinning
        normals = rng.standard_normal((total, k))
        log_unif = np.log(rng.random((total, k)))
        draws, acc, prop, step = kernels.rw_metropolis(
            model.code, slot_src, slot_val, x, prior_codes, prior_params, positive,
            u0, step0, normals, log_unif,
            int(cfg.burn_in), int(cfg.thinning), int(size), float(cfg.target_accept), int(cfg.adapt_every),
        )
        blocks.append(draws)
        chains.append(np.full(size, c))
        n_acc += int(acc)
        n_prop += int(prop)

    rate = n_acc / n_prop if n_prop else 0.0
    if not 0.05 <= rate <= 0.95:
        msg = f"Metropolis acceptance rate {rate:.3f} outside [0.05, 0.95] after adaptation"
        warn.append(msg)
        warnings.warn(msg, SamplerDiagnosticWarning, stacklevel=3)
    return PosteriorDraws(
        draws=np.concatenate(blocks),
        seed=seed,
        sampler=Sampler.METROPOLIS,
        chain_count=cfg.chain_count,
        acceptance_rate=rate,
        burn_in=cfg.burn_in,
        thinning=cfg.thinning,
        param_names=model.param_names,
        chain_index=np.concatenate(chains),
        step_sizes=tuple(float(s) for s in step),
        warnings=tuple(warn),
    )


def evaluate_g(g, theta):
    """Evaluate a g-function on an (M, k) draw matrix; returns (M, s)."""
    values = g.evaluate(theta) if hasattr(g, "evaluate") else g(theta)
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    return values


def distorted_expectation_reweighted(draws, model, data, family, alpha, g, prior=None, mode=Mode.LIKELIHOOD):
    """Self-normalized estimate of E[g] under the distorted posterior at ``alpha``.

    Each draw of the ordinary posterior is weighted by the product of
    h'_alpha terms that the distortion adds to the likelihood (and/or prior),
    computed in log space and shifted by its maximum before exponentiating.
    """
    mode = mode_from_name(mode)
    theta = draws.draws
    g_vals = evaluate_g(g, theta)
    if float(alpha) == family.alpha0:
        return g_vals.mean(axis=0)

    log_w = np.zeros(theta.shape[0])
    if mode in (Mode.LIKELIHOOD, Mode.DOUBLE):
        log_w = log_w + likelihood_log_weights(family, alpha, model, theta, data)
    if mode in (Mode.PRIOR, Mode.DOUBLE):
        if prior is None:
            raise ModelContractError("prior distortion needs the prior")
        log_w = log_w + prior_log_weights(family, alpha, prior, theta)

    if np.any(np.isnan(log_w)) or np.any(log_w == np.inf):
        raise DegenerateWeightsError(f"non-finite log-weights at alpha={alpha} for {family.name}")
    top = np.max(log_w)
    if not np.isfinite(top):
        raise DegenerateWeightsError(f"all weights are zero at alpha={alpha} for {family.name}")
    w = np.exp(log_w - top)
    total = w.sum()
    ess = total * total / np.dot(w, w)
    if ess < 10.0:
        warnings.warn(f"effective sample size {ess:.1f} < 10 at alpha={alpha}", LowEffectiveSampleWarning, stacklevel=2)
    return (w @ g_vals) / total
