"""Selects between numba-compiled kernels and the pure-numpy fallback.

Set ``RESILIENT_SUBMOD_DISABLE_NUMBA=1`` before import to force the numpy
path; it is also used automatically when numba cannot be imported.
"""
import os

_FLAG = "RESILIENT_SUBMOD_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
NUMBA_ENABLED = HAVE_NUMBA and os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, identity decorator otherwise.

    Compiled versions are built even when the env flag disables them, so the
    benchmark and the cross-path tests can call both variants directly.
    """
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
