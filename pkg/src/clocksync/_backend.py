"""Backend selection for the numerical kernels.

Two implementations of every hot kernel exist: a numba-compiled one and a
plain numpy one with identical semantics. The active backend is chosen once
at import time from the CLOCKSYNC_BACKEND environment variable:

    auto   use numba when importable, else numpy (default)
    numba  require numba, raise if it cannot be imported
    numpy  force the pure-numpy path even when numba is present
"""

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False

_VALID = ("auto", "numba", "numpy")


def _resolve(name: str) -> str:
    if name not in _VALID:
        raise ValueError(f"CLOCKSYNC_BACKEND must be one of {_VALID}, got {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("CLOCKSYNC_BACKEND=numba but numba is not importable")
    if name == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    return name


ACTIVE_BACKEND = _resolve(os.environ.get("CLOCKSYNC_BACKEND", "auto"))


def get_backend() -> str:
    """Name of the backend actually in use: 'numba' or 'numpy'."""
    return ACTIVE_BACKEND


def njit_or_identity(func):
    """Compile with numba when it is the active backend, else return as-is."""
    if ACTIVE_BACKEND == "numba":
        return numba.njit(cache=True)(func)
    return func
