"""Kernel backend selection.

Hot loops are written once in scalar style. With numba available they are
compiled by ``njit``; setting ``POLYFF_NUMBA=0`` in the environment (or not
having numba installed) runs the very same functions as plain Python over
numpy arrays. The flag is read once, at import time.
"""
import os

_flag = os.environ.get("POLYFF_NUMBA", "1").strip().lower()
_wanted = _flag not in ("0", "false", "no", "off")

try:
    if not _wanted:
        raise ImportError
    from numba import njit as _njit

    USE_NUMBA = True
except ImportError:
    _njit = None
    USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"


def kernel(func):
    """Compile ``func`` with numba when enabled, else return it unchanged."""
    if USE_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    return func
