"""Kernel backend selection.

The compiled Cython kernels are used when the extension module built;
otherwise (or when AVESOR_PURE_PYTHON is set) the numpy/LAPACK fallbacks
take over.  Both expose the same functions with identical semantics.
"""
from __future__ import annotations

import os

from . import _fallback

if os.environ.get("AVESOR_PURE_PYTHON"):
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _fallback

COMPILED = kernels.BACKEND_NAME == "compiled"


def backend_name():
    """Name of the active kernel backend ("compiled" or "python")."""
    return kernels.BACKEND_NAME
