"""Kernel backend selection.

The compiled extension ``robustar._kernels`` is used when it imports; the
numpy implementation in ``robustar._kernels_py`` otherwise. Setting the
environment variable ``ROBUSTAR_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("ROBUSTAR_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

backshift_filter = _impl.backshift_filter
cross_products = _impl.cross_products
t_weights = _impl.t_weights
weighted_gram = _impl.weighted_gram
weighted_ssq = _impl.weighted_ssq

__all__ = ["BACKEND", "backshift_filter", "cross_products", "t_weights",
           "weighted_gram", "weighted_ssq"]
