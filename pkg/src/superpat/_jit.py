"""
Numba switch for the hot kernels.

Setting ``SUPERPAT_DISABLE_JIT=1`` (or running without numba installed) turns
``njit`` into a no-op so the same kernel source runs as plain Python on numpy
scalars and arrays. Useful for debugging and for the benchmark comparison.
"""

import os

_flag = os.environ.get("SUPERPAT_DISABLE_JIT", "").strip().lower()
JIT_REQUESTED = _flag in ("", "0", "false", "no")

try:
    if not JIT_REQUESTED:
        raise ImportError
    from numba import njit

    JIT_ENABLED = True
except ImportError:
    JIT_ENABLED = False

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper


def backend_name():
    return "numba" if JIT_ENABLED else "python"
