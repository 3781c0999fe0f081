"""Switch between the numba-compiled kernels and the pure-numpy path.

Set ``DISTSENS_NUMBA=0`` in the environment before import to force the numpy
path. When numba is not installed the numpy path is used silently.
"""
import os

_FLAG = os.environ.get("DISTSENS_NUMBA", "1").strip().lower()

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("0", "false", "no", "off")


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
