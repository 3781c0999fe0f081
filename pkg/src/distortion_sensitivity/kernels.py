"""Backend-selected hot kernels.

``score_totals``, ``log_weight_totals`` and ``rw_metropolis`` come from the
numba module unless ``DISTSENS_NUMBA=0`` is set (or numba is missing), in
which case the numpy implementations are used. Both backends consume the same
pre-drawn random numbers, so a Metropolis run is reproducible across them.
"""
from ._accel import USE_NUMBA, backend_name

if USE_NUMBA:
    from ._kernels_nb import log_weight_totals, rw_metropolis, score_totals
else:
    from ._kernels_np import log_weight_totals, rw_metropolis, score_totals

BACKEND = backend_name()

__all__ = ["BACKEND", "log_weight_totals", "rw_metropolis", "score_totals"]
