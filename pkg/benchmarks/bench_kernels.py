"""Time the numba and numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--M 2000] [--n 200] [--repeat 5]

Both backend modules are imported directly, so the environment flag does not
matter here. The first numba call (compilation, or cache load) is timed
separately and excluded from the steady-state numbers. Results agree to
rounding; the script checks this before printing timings.
"""
import argparse
import time

import numpy as np

from distortion_sensitivity import _codes, _kernels_np
from distortion_sensitivity.models import Gamma, default_prior

try:
    from distortion_sensitivity import _kernels_nb
except ImportError:  # numba missing
    _kernels_nb = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--M", type=int, default=2000)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--burn-in", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    model = Gamma()
    rng = np.random.default_rng(0)
    x = rng.gamma(1.5, 1.0, args.n)
    params = np.ascontiguousarray(model.slots(np.column_stack([rng.gamma(20, 0.075, args.M),
                                                               rng.gamma(20, 0.05, args.M)])))
    prior = default_prior(model)
    pc, pp = prior.kernel_arrays()
    src, val = model.kernel_slots()
    pos = np.array(model.positive)
    u0 = np.log(model.initial_guess(x))
    step0 = np.full(2, 0.2)
    total = args.burn_in + args.M
    normals = rng.standard_normal((total, 2))
    logu = np.log(rng.random((total, 2)))

    cases = {
        "score_totals power-cdf": lambda k: k.score_totals(_codes.POWER_CDF, model.code, params, x),
        "log_weight_totals power-survival a=1.1": lambda k: k.log_weight_totals(
            _codes.POWER_SURVIVAL, 1.1, model.code, params, x),
        "rw_metropolis": lambda k: k.rw_metropolis(model.code, src, val, x, pc, pp, pos, u0, step0, normals, logu,
                                                   args.burn_in, 1, args.M, 0.35, 50),
    }

    print(f"M={args.M} n={args.n} burn_in={args.burn_in} best of {args.repeat}")
    print(f"{'kernel':42s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, call in cases.items():
        t_np, out_np = best_of(lambda: call(_kernels_np), args.repeat)
        if _kernels_nb is None:
            print(f"{name:42s} {t_np:10.4f} {'n/a':>10s}")
            continue
        t0 = time.perf_counter()
        call(_kernels_nb)
        first = time.perf_counter() - t0
        t_nb, out_nb = best_of(lambda: call(_kernels_nb), args.repeat)
        a = out_np[0] if isinstance(out_np, tuple) else out_np
        b = out_nb[0] if isinstance(out_nb, tuple) else out_nb
        if not np.allclose(a, b, rtol=1e-9, atol=1e-9):
            raise SystemExit(f"{name}: backends disagree (max diff {np.max(np.abs(a - b)):.3g})")
        print(f"{name:42s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}   (first numba call {first:.2f}s)")


if __name__ == "__main__":
    main()
