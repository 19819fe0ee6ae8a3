"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when
``FRACTALHISTO_PURE_PYTHON`` is set to a non-empty value, the pure-Python
fallback is used.  ``FRACTALHISTO_THREADS`` caps internal parallelism.
"""

import os

from . import _fallback

try:
    if os.environ.get("FRACTALHISTO_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _fallback
    BACKEND = "python"


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("FRACTALHISTO_THREADS", "1")))
    except ValueError:
        return 1


def backends() -> dict:
    """All importable backends by name, for tests and benchmarks."""
    found = {"python": _fallback}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found


chaos_orbit = _impl.chaos_orbit


def min_deta(pts, bt, bx, eta):
    return _impl.min_deta(pts, bt, bx, eta, thread_count())
