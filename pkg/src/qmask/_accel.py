"""Optional numba acceleration.

Set ``QMASK_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when numba
is installed. Both paths produce identical results.
"""

import os

USE_NUMBA = False
njit = None

if os.environ.get("QMASK_DISABLE_NUMBA", "0").strip().lower() not in ("1", "true", "yes"):
    try:
        from numba import njit  # noqa: F811

        USE_NUMBA = True
    except ImportError:  # pragma: no cover - depends on the environment
        njit = None


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
