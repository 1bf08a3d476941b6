"""Optional numba acceleration.

Kernels are written in the numba-compatible subset of numpy. When numba is
missing, or ``SUBJET_DISABLE_NUMBA`` is set to a truthy value, ``njit``
returns the plain Python function and the same body runs under numpy.
"""

import os

_FLAG = os.environ.get("SUBJET_DISABLE_NUMBA", "").strip().lower()

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba ships with the test env
    _numba = None

NUMBA_ENABLED = _numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(fn):
    if NUMBA_ENABLED:
        return _numba.njit(cache=False, fastmath=False)(fn)
    return fn


def python_version(fn):
    """Return the uncompiled implementation behind a possibly-jitted kernel."""
    return getattr(fn, "py_func", fn)
