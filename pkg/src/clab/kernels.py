"""Kernel dispatch: compiled extension when available, Python otherwise.

Set ``CLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("CLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

components = _impl.components
propagate = _impl.propagate
skew_orbit = _impl.skew_orbit

__all__ = ["BACKEND", "components", "propagate", "skew_orbit"]
