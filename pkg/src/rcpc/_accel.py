"""Backend selection for the hot kernels.

Set ``RCPC_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when numba
is importable.  The choice is made once, at import time.
"""
from __future__ import annotations

import os

_DISABLED = os.environ.get("RCPC_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
