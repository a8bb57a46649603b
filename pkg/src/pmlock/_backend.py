"""Kernel backend selection.

Set ``PMLOCK_BACKEND=numpy`` to bypass numba and run the pure numpy / pure
Python kernels. Default is ``numba`` when it can be imported.
"""
import os

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

BACKEND = os.environ.get("PMLOCK_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise ValueError(f"PMLOCK_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")
USE_NUMBA = HAVE_NUMBA and BACKEND == "numba"


def njit(fn):
    """Compile ``fn`` with numba (lazily, cached on disk) when available."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


def select(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl
