"""Pure-numpy versions of the hot kernels.

Every function here has a twin with the same signature in ``_kernels_nb``.
Distribution functions take a model code and two parameter slots so that the
same call works for every family; unused slots are ignored.
"""
import math

import numpy as np
from scipy import special

from ._codes import (
    CENSOR_LOWER,
    CENSOR_UPPER,
    EXPONENTIAL,
    GAMMA,
    LOGNORMAL,
    NORMAL,
    POWER_CDF,
    POWER_SURVIVAL,
    SKEWING,
)

LOG_2PI = math.log(2.0 * math.pi)
# rows per block when materialising (draws x observations) matrices
_BLOCK_ELEMS = 1 << 20


def logpdf(code, p0, p1, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if code == EXPONENTIAL:
            out = np.where(x >= 0.0, np.log(p0) - p0 * x, -np.inf)
        elif code == GAMMA:
            out = special.xlogy(p0 - 1.0, x) + p0 * np.log(p1) - p1 * x - special.gammaln(p0)
            out = np.where(x >= 0.0, out, -np.inf)
        elif code == LOGNORMAL:
            lx = np.log(x)
            z = (lx - p0) / p1
            out = np.where(x > 0.0, -lx - np.log(p1) - 0.5 * LOG_2PI - 0.5 * z * z, -np.inf)
        elif code == NORMAL:
            z = (x - p0) / p1
            out = -np.log(p1) - 0.5 * LOG_2PI - 0.5 * z * z
        else:
            raise ValueError(f"unknown model code {code}")
    return out


def cdf(code, p0, p1, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if code == EXPONENTIAL:
            out = np.where(x > 0.0, -np.expm1(-p0 * np.maximum(x, 0.0)), 0.0)
        elif code == GAMMA:
            out = special.gammainc(p0, p1 * np.maximum(x, 0.0))
        elif code == LOGNORMAL:
            out = np.where(x > 0.0, special.ndtr((np.log(x) - p0) / p1), 0.0)
        elif code == NORMAL:
            out = special.ndtr((x - p0) / p1)
        else:
            raise ValueError(f"unknown model code {code}")
    return out


def survival(code, p0, p1, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if code == EXPONENTIAL:
            out = np.where(x > 0.0, np.exp(-p0 * np.maximum(x, 0.0)), 1.0)
        elif code == GAMMA:
            out = special.gammaincc(p0, p1 * np.maximum(x, 0.0))
        elif code == LOGNORMAL:
            out = np.where(x > 0.0, special.ndtr(-(np.log(x) - p0) / p1), 1.0)
        elif code == NORMAL:
            out = special.ndtr(-(x - p0) / p1)
        else:
            raise ValueError(f"unknown model code {code}")
    return out


def logcdf(code, p0, p1, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if code == EXPONENTIAL:
            out = np.where(x > 0.0, np.log(-np.expm1(-p0 * np.maximum(x, 0.0))), -np.inf)
        elif code == GAMMA:
            out = np.log(special.gammainc(p0, p1 * np.maximum(x, 0.0)))
        elif code == LOGNORMAL:
            out = np.where(x > 0.0, special.log_ndtr((np.log(x) - p0) / p1), -np.inf)
        elif code == NORMAL:
            out = special.log_ndtr((x - p0) / p1)
        else:
            raise ValueError(f"unknown model code {code}")
    return out


def logsf(code, p0, p1, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if code == EXPONENTIAL:
            out = np.where(x > 0.0, -p0 * np.maximum(x, 0.0), 0.0)
        elif code == GAMMA:
            out = np.log(special.gammaincc(p0, p1 * np.maximum(x, 0.0)))
        elif code == LOGNORMAL:
            out = np.where(x > 0.0, special.log_ndtr(-(np.log(x) - p0) / p1), 0.0)
        elif code == NORMAL:
            out = special.log_ndtr(-(x - p0) / p1)
        else:
            raise ValueError(f"unknown model code {code}")
    return out


def _blocks(m, n):
    rows = max(1, _BLOCK_ELEMS // max(n, 1))
    for start in range(0, m, rows):
        yield start, min(m, start + rows)


def score_totals(fcode, mcode, params, x):
    """Sum over observations of the per-observation distortion score.

    Returns ``(totals, bad_draw, bad_obs)``; the indices are -1 unless some
    score is undefined, in which case they locate the first offender.
    """
    m = params.shape[0]
    n = x.shape[0]
    totals = np.empty(m)
    if fcode == CENSOR_LOWER or fcode == CENSOR_UPPER:
        c = 1.0 if fcode == CENSOR_LOWER else -1.0
        totals[:] = c * n
        return totals, -1, -1
    if fcode == SKEWING:
        f0 = np.exp(logpdf(mcode, params[:, 0], params[:, 1], 0.0))
        totals[:] = 2.0 * f0 * np.sum(x)
        return totals, -1, -1
    tail = logcdf if fcode == POWER_CDF else logsf
    for lo, hi in _blocks(m, n):
        logs = tail(mcode, params[lo:hi, 0, None], params[lo:hi, 1, None], x[None, :])
        bad = ~np.isfinite(logs)
        if bad.any():
            rows, cols = np.nonzero(bad)
            return totals, lo + int(rows[0]), int(cols[0])
        totals[lo:hi] = np.sum(1.0 + logs, axis=1)
    return totals, -1, -1


def log_weight_totals(fcode, alpha, mcode, params, x):
    """Per draw, sum over observations of log h'_alpha(F(x_i | theta))."""
    m = params.shape[0]
    n = x.shape[0]
    out = np.empty(m)
    for lo, hi in _blocks(m, n):
        p0 = params[lo:hi, 0, None]
        p1 = params[lo:hi, 1, None]
        xx = x[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            if fcode == POWER_CDF:
                terms = math.log(alpha) + (alpha - 1.0) * logcdf(mcode, p0, p1, xx)
            elif fcode == POWER_SURVIVAL:
                terms = math.log(alpha) + (alpha - 1.0) * logsf(mcode, p0, p1, xx)
            elif fcode == CENSOR_LOWER:
                f = cdf(mcode, p0, p1, xx)
                terms = np.where(f > alpha, -math.log1p(-alpha), -np.inf)
            elif fcode == CENSOR_UPPER:
                f = cdf(mcode, p0, p1, xx)
                terms = np.where(f < alpha, -math.log(alpha), -np.inf)
            elif fcode == SKEWING:
                terms = math.log(2.0) + logcdf(mcode, p0, p1, alpha * xx)
            else:
                raise ValueError(f"unknown family code {fcode}")
        out[lo:hi] = np.sum(terms, axis=1)
    return out


def log_target(u, mcode, slot_src, slot_val, x, prior_codes, prior_params, positive):
    """Log posterior density of the unconstrained parameter vector ``u``."""
    theta = np.where(positive, np.exp(u), u)
    p0 = theta[slot_src[0]] if slot_src[0] >= 0 else slot_val[0]
    p1 = theta[slot_src[1]] if slot_src[1] >= 0 else slot_val[1]
    total = np.sum(logpdf(mcode, p0, p1, x))
    for j in range(theta.shape[0]):
        total += logpdf(prior_codes[j], prior_params[j, 0], prior_params[j, 1], theta[j])
    total += np.sum(u[positive])
    return float(total)


def rw_metropolis(mcode, slot_src, slot_val, x, prior_codes, prior_params, positive,
                  u0, step0, normals, log_unif, burn_in, thinning, n_keep, target, adapt_every):
    k = u0.shape[0]
    u = u0.copy()
    step = step0.copy()
    lt = log_target(u, mcode, slot_src, slot_val, x, prior_codes, prior_params, positive)
    draws = np.empty((n_keep, k))
    batch_acc = np.zeros(k)
    n_accept = 0
    n_prop = 0
    n_batches = 0
    kept = 0
    total_iters = burn_in + n_keep * thinning
    for it in range(total_iters):
        for j in range(k):
            old = u[j]
            u[j] = old + step[j] * normals[it, j]
            lt_new = log_target(u, mcode, slot_src, slot_val, x, prior_codes, prior_params, positive)
            if log_unif[it, j] < lt_new - lt:
                lt = lt_new
                batch_acc[j] += 1.0
                if it >= burn_in:
                    n_accept += 1
            else:
                u[j] = old
            if it >= burn_in:
                n_prop += 1
        if it < burn_in:
            if (it + 1) % adapt_every == 0:
                n_batches += 1
                gain = 2.0 / math.sqrt(n_batches)
                for j in range(k):
                    rate = batch_acc[j] / adapt_every
                    step[j] *= math.exp(gain * (rate - target))
                    batch_acc[j] = 0.0
        elif (it - burn_in + 1) % thinning == 0:
            for j in range(k):
                draws[kept, j] = math.exp(u[j]) if positive[j] else u[j]
            kept += 1
    return draws, n_accept, n_prop, step
