"""Backend selection for the planning kernels.

The numba kernels are used when numba imports cleanly, unless the
``BTAI_BF_BACKEND`` environment variable is set to ``numpy``. The numpy path is
a vectorized reimplementation of the same planning loop, not the numba source
run uncompiled.
"""

from __future__ import annotations

import os

NUMBA = "numba"
NUMPY = "numpy"
BACKENDS = (NUMBA, NUMPY)

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    numba = None
    HAVE_NUMBA = False


def _default_backend() -> str:
    requested = os.environ.get("BTAI_BF_BACKEND", "").strip().lower()
    if requested == NUMPY:
        return NUMPY
    if requested not in ("", NUMBA):
        raise ValueError(
            f"BTAI_BF_BACKEND must be one of {BACKENDS}, got {requested!r}"
        )
    return NUMBA if HAVE_NUMBA else NUMPY


BACKEND = _default_backend()


def resolve_backend(backend: str | None) -> str:
    if backend is None:
        return BACKEND
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if backend == NUMBA and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a pass-through decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda fn: fn
