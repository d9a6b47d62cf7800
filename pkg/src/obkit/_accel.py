"""Kernel acceleration switch.

Hot inner loops ship in two flavors: a numba ``@njit`` build and a pure
numpy build with identical semantics. The numba path is the default; set
``OBKIT_NUMBA=0`` to force the numpy fallback (useful on platforms where
numba is unavailable and for the paired benchmark in ``benchmarks/``).
Both paths must produce bit-identical results; the test suite asserts this
on random inputs.
"""

import os

__all__ = ["NUMBA_ENABLED", "njit", "prange"]


def _env_wants_numba() -> bool:
    val = os.environ.get("OBKIT_NUMBA", "1").strip().lower()
    return val not in ("0", "false", "no", "off")


NUMBA_ENABLED = False

if _env_wants_numba():
    try:
        from numba import njit, prange  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - exercised only without numba
        pass

if not NUMBA_ENABLED:  # fallback decorator: leave the function as plain python
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap

    prange = range
