"""Numba switch.

Set ``ATOMSIM_DISABLE_NUMBA=1`` to run every kernel through its pure-numpy /
pure-Python path. The flag is read once at import time.
"""

import os

_FLAG = os.environ.get("ATOMSIM_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    if DISABLED:
        raise ImportError("numba disabled by ATOMSIM_DISABLE_NUMBA")
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    _njit = None
    HAS_NUMBA = False


def njit(func):
    """Compile ``func`` in nopython mode with caching, or return it untouched."""
    if not HAS_NUMBA:
        return func
    return _njit(cache=True, nogil=True)(func)


def backend():
    return "numba" if HAS_NUMBA else "numpy"
