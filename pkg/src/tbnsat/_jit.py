"""Optional numba acceleration.

Kernels are written once against numpy arrays and decorated with
:func:`njit`.  Setting ``TBNSAT_DISABLE_JIT=1`` (or running without numba
installed) leaves them as plain Python functions operating on the same
arrays, which is slow but convenient for debugging and coverage.
"""
import os

_flag = os.environ.get("TBNSAT_DISABLE_JIT", "").strip().lower()
DISABLE_JIT = _flag not in ("", "0", "false", "no")

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

JIT_ENABLED = _numba is not None and not DISABLE_JIT


def njit(fn=None, **kwargs):
    if not JIT_ENABLED:
        return fn if fn is not None else (lambda f: f)
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    if fn is None:
        return _numba.njit(**kwargs)
    return _numba.njit(**kwargs)(fn)


def backend_name() -> str:
    return "numba" if JIT_ENABLED else "python"
