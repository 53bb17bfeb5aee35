"""Kernel backend selection.

``QIR_BACKEND=numpy`` forces the plain-numpy path, ``QIR_BACKEND=numba``
requires numba. When unset, numba is used if it imports and numpy
otherwise. Resolved once at import time.
"""

import os

from . import _kernels_numpy

_ENV_VAR = "QIR_BACKEND"


def _load():
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice not in ("", "numpy", "numba"):
        raise ValueError(
            f"{_ENV_VAR} must be 'numpy' or 'numba', got {choice!r}"
        )
    if choice == "numpy":
        return "numpy", _kernels_numpy
    try:
        from . import _kernels_numba
    except ImportError:
        if choice == "numba":
            raise
        return "numpy", _kernels_numpy
    return "numba", _kernels_numba


BACKEND_NAME, _impl = _load()

projected_norms_sq = _impl.projected_norms_sq
project_onto = _impl.project_onto
orthonormalize = _impl.orthonormalize


def backend_name() -> str:
    """Name of the kernel backend in use ('numba' or 'numpy')."""
    return BACKEND_NAME
