"""Kernel backend selection.

Numba is used when importable unless ``CAPPED_LSMC_DISABLE_NUMBA`` is set to a
truthy value, in which case every kernel falls back to its pure-numpy twin.
The flag is read once, at import time.
"""

import os

_FLAG = "CAPPED_LSMC_DISABLE_NUMBA"


def _flag_set() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() not in ("", "0", "false", "no")


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    _numba = None

HAVE_NUMBA = _numba is not None
USE_NUMBA = HAVE_NUMBA and not _flag_set()
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(fn):
    """``numba.njit(cache=True, nogil=True)`` when numba is available, identity otherwise."""
    if not HAVE_NUMBA:
        return fn
    return _numba.njit(cache=True, nogil=True)(fn)
