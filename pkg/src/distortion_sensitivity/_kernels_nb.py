"""numba-compiled versions of the hot kernels (see ``_kernels_np``)."""
import math

import numpy as np
from numba import njit

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
from ._special_nb import log_gammainc_p, log_gammainc_q, log_ndtr, gammainc_p, ndtr

LOG_2PI = math.log(2.0 * math.pi)


@njit(cache=True)
def logpdf1(code, p0, p1, x):
    if code == EXPONENTIAL:
        if x < 0.0:
            return -math.inf
        return math.log(p0) - p0 * x
    if code == GAMMA:
        if x < 0.0:
            return -math.inf
        if x == 0.0:
            if p0 == 1.0:
                return math.log(p1)
            return -math.inf if p0 > 1.0 else math.inf
        return (p0 - 1.0) * math.log(x) + p0 * math.log(p1) - p1 * x - math.lgamma(p0)
    if code == LOGNORMAL:
        if x <= 0.0:
            return -math.inf
        lx = math.log(x)
        z = (lx - p0) / p1
        return -lx - math.log(p1) - 0.5 * LOG_2PI - 0.5 * z * z
    z = (x - p0) / p1
    return -math.log(p1) - 0.5 * LOG_2PI - 0.5 * z * z


@njit(cache=True)
def cdf1(code, p0, p1, x):
    if code == EXPONENTIAL:
        return -math.expm1(-p0 * x) if x > 0.0 else 0.0
    if code == GAMMA:
        return gammainc_p(p0, p1 * x) if x > 0.0 else 0.0
    if code == LOGNORMAL:
        return ndtr((math.log(x) - p0) / p1) if x > 0.0 else 0.0
    return ndtr((x - p0) / p1)


@njit(cache=True)
def logcdf1(code, p0, p1, x):
    if code == EXPONENTIAL:
        return math.log(-math.expm1(-p0 * x)) if x > 0.0 else -math.inf
    if code == GAMMA:
        return log_gammainc_p(p0, p1 * x) if x > 0.0 else -math.inf
    if code == LOGNORMAL:
        return log_ndtr((math.log(x) - p0) / p1) if x > 0.0 else -math.inf
    return log_ndtr((x - p0) / p1)


@njit(cache=True)
def logsf1(code, p0, p1, x):
    if code == EXPONENTIAL:
        return -p0 * x if x > 0.0 else 0.0
    if code == GAMMA:
        return log_gammainc_q(p0, p1 * x) if x > 0.0 else 0.0
    if code == LOGNORMAL:
        return log_ndtr(-(math.log(x) - p0) / p1) if x > 0.0 else 0.0
    return log_ndtr(-(x - p0) / p1)


@njit(cache=True)
def score_totals(fcode, mcode, params, x):
    m = params.shape[0]
    n = x.shape[0]
    totals = np.empty(m)
    if fcode == CENSOR_LOWER or fcode == CENSOR_UPPER:
        c = 1.0 if fcode == CENSOR_LOWER else -1.0
        for r in range(m):
            totals[r] = c * n
        return totals, -1, -1
    if fcode == SKEWING:
        sx = 0.0
        for i in range(n):
            sx += x[i]
        for r in range(m):
            totals[r] = 2.0 * math.exp(logpdf1(mcode, params[r, 0], params[r, 1], 0.0)) * sx
        return totals, -1, -1
    for r in range(m):
        p0 = params[r, 0]
        p1 = params[r, 1]
        s = 0.0
        for i in range(n):
            if fcode == POWER_CDF:
                lv = logcdf1(mcode, p0, p1, x[i])
            else:
                lv = logsf1(mcode, p0, p1, x[i])
            if not math.isfinite(lv):
                return totals, r, i
            s += 1.0 + lv
        totals[r] = s
    return totals, -1, -1


@njit(cache=True)
def log_weight_totals(fcode, alpha, mcode, params, x):
    m = params.shape[0]
    n = x.shape[0]
    out = np.empty(m)
    log_alpha = math.log(alpha) if alpha > 0.0 else -math.inf
    for r in range(m):
        p0 = params[r, 0]
        p1 = params[r, 1]
        s = 0.0
        for i in range(n):
            if fcode == POWER_CDF:
                s += log_alpha + (alpha - 1.0) * logcdf1(mcode, p0, p1, x[i])
            elif fcode == POWER_SURVIVAL:
                s += log_alpha + (alpha - 1.0) * logsf1(mcode, p0, p1, x[i])
            elif fcode == CENSOR_LOWER:
                if cdf1(mcode, p0, p1, x[i]) > alpha:
                    s += -math.log1p(-alpha)
                else:
                    s = -math.inf
            elif fcode == CENSOR_UPPER:
                if cdf1(mcode, p0, p1, x[i]) < alpha:
                    s += -log_alpha
                else:
                    s = -math.inf
            else:
                s += math.log(2.0) + logcdf1(mcode, p0, p1, alpha * x[i])
        out[r] = s
    return out


@njit(cache=True)
def log_target(u, mcode, slot_src, slot_val, x, prior_codes, prior_params, positive):
    k = u.shape[0]
    theta = np.empty(k)
    extra = 0.0
    for j in range(k):
        if positive[j]:
            theta[j] = math.exp(u[j])
            extra += u[j]
        else:
            theta[j] = u[j]
    p0 = theta[slot_src[0]] if slot_src[0] >= 0 else slot_val[0]
    p1 = theta[slot_src[1]] if slot_src[1] >= 0 else slot_val[1]
    total = 0.0
    for i in range(x.shape[0]):
        total += logpdf1(mcode, p0, p1, x[i])
    for j in range(k):
        total += logpdf1(prior_codes[j], prior_params[j, 0], prior_params[j, 1], theta[j])
    return total + extra


@njit(cache=True)
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
