"""Kernel backend selection.

Hot numeric kernels in this package are written once, in numba-compatible
style, and compiled with ``numba.njit`` by default.  Setting the environment
variable ``HETBEC_NUMBA=0`` before import selects the pure NumPy/Python
fallback path (same source, interpreted).  ``benchmarks/bench_backends.py``
compares the two.
"""

import os

_flag = os.environ.get("HETBEC_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "false", "no", "off")

if NUMBA_REQUESTED:
    try:
        import numba as _numba
        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        _numba = None
        NUMBA_ENABLED = False
else:
    _numba = None
    NUMBA_ENABLED = False


def backend_name():
    return "numba" if NUMBA_ENABLED else "numpy"


def jit(**options):
    """Decorator for hot kernels: ``numba.njit`` when enabled, no-op otherwise.

    Always used with parentheses: ``@jit()`` or ``@jit(parallel=True)``.
    The decorated function keeps a ``py_func`` attribute pointing at the
    uncompiled implementation on both backends.
    """

    def wrap(func):
        if NUMBA_ENABLED:
            options.setdefault("cache", True)
            return _numba.njit(**options)(func)
        func.py_func = func
        return func

    return wrap


if NUMBA_ENABLED:
    from numba import prange
else:
    prange = range
