"""Selection of the numeric kernel backend (numba JIT vs pure numpy).

The hot inner loops in :mod:`mmgbsm._kernels` exist in two equivalent
implementations.  Which one runs is controlled by the ``MMGBSM_BACKEND``
environment variable:

* ``numba``  -- JIT-compiled kernels (default when numba imports cleanly)
* ``numpy``  -- vectorized pure-numpy fallback

``set_backend`` switches at runtime, which the test suite and the kernel
benchmark use to compare both paths on identical inputs.
"""

from __future__ import annotations

import os

ENV_VAR = "MMGBSM_BACKEND"
_VALID = ("numba", "numpy")


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _detect() -> str:
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice and choice not in _VALID:
        raise ValueError(f"{ENV_VAR} must be one of {_VALID}, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    if choice == "numba" and not _numba_available():
        raise ImportError(f"{ENV_VAR}=numba requested but numba is not importable")
    return "numba" if _numba_available() else "numpy"


_active = _detect()


def active_backend() -> str:
    """Name of the backend kernels currently dispatch to."""
    return _active


def set_backend(name: str) -> str:
    """Switch kernel backend; returns the previous one."""
    global _active
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}, got {name!r}")
    if name == "numba" and not _numba_available():
        raise ImportError("numba backend requested but numba is not importable")
    previous = _active
    _active = name
    return previous
