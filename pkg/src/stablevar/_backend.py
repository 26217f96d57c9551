"""Kernel backend selection.

The compiled Cython kernels are used when importable. Setting
``STABLEVAR_PURE_PYTHON=1`` before import forces the NumPy fallback.
"""

import os

from . import _pykernels

try:
    from . import _kernels as _ckernels
except ImportError:  # extension not built
    _ckernels = None

HAVE_EXTENSION = _ckernels is not None
BACKENDS = ("cython", "python") if HAVE_EXTENSION else ("python",)

if HAVE_EXTENSION and not os.environ.get("STABLEVAR_PURE_PYTHON"):
    DEFAULT_BACKEND = "cython"
else:
    DEFAULT_BACKEND = "python"


def get_kernels(backend=None):
    """Return the kernel module for ``backend`` (default: the selected one)."""
    backend = backend or DEFAULT_BACKEND
    if backend == "cython":
        if _ckernels is None:
            raise ImportError("stablevar was built without the Cython extension")
        return _ckernels
    if backend == "python":
        return _pykernels
    raise ValueError(f"unknown backend {backend!r}")


def ar1_filter(F, W, y0, backend=None):
    import numpy as np

    k = get_kernels(backend)
    return k.ar1_filter(
        np.ascontiguousarray(F, dtype=float),
        np.ascontiguousarray(W, dtype=float),
        np.ascontiguousarray(y0, dtype=float),
    )
