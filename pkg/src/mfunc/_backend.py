"""Backend selection: numba-accelerated kernels with a pure-numpy fallback.

The environment variable MFUNC_BACKEND picks the implementation:

  MFUNC_BACKEND=numba   use numba @njit kernels (default when importable)
  MFUNC_BACKEND=numpy   force the pure-numpy fallback

Anything else (or an absent numba) silently falls back to numpy. The two
backends implement identical algorithms; results agree to floating-point
roundoff, and each backend is bitwise deterministic for a fixed seed.
"""

from __future__ import annotations

import os

_requested = os.environ.get("MFUNC_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"MFUNC_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

HAS_NUMBA = False
if _requested != "numpy":
    try:
        import numba  # noqa: F401

        HAS_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError(
                "MFUNC_BACKEND=numba requested but numba is not importable"
            )

USE_NUMBA = HAS_NUMBA


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


if USE_NUMBA:
    from numba import njit
else:

    def njit(*args, **kwargs):
        """Signature-compatible no-op decorator for the numpy backend."""

        def wrap(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return wrap


def set_threads(n: int) -> None:
    """Best-effort thread-count hint; kernels here are single-threaded."""
    if USE_NUMBA and n >= 1:
        try:
            import numba

            numba.set_num_threads(n)
        except ValueError:
            pass
