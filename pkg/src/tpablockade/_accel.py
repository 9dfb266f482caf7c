"""JIT switch for the numeric kernels.

Numba is used when it imports cleanly and ``TPABLOCKADE_DISABLE_NUMBA`` is
unset (or set to ``0``/``false``). Otherwise every kernel runs its pure-numpy
path. ``NUMBA_DISABLE_JIT=1`` is honoured by numba itself.
"""

import os

_FLAG = "TPABLOCKADE_DISABLE_NUMBA"


def _flag_set(value):
    return value.strip().lower() not in ("", "0", "false", "no", "off")


try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not _flag_set(os.environ.get(_FLAG, ""))


def njit(func):
    """Compile ``func`` in nopython mode (cached), or raise if numba is missing."""
    if not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not installed")
    return numba.njit(cache=True)(func)
