"""Kernel selection: the Cython extension when built, numpy otherwise.

Set ``GRAPHTENSOR_PURE=1`` to force the numpy path.
"""

from __future__ import annotations

import os

from . import _fallback

BACKEND = "numpy"
treewidth_dp = _fallback.treewidth_dp
holant_sum = _fallback.holant_sum

if not os.environ.get("GRAPHTENSOR_PURE"):
    try:
        from . import _core
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        treewidth_dp = _core.treewidth_dp
        holant_sum = _core.holant_sum

INT64_MAX = (1 << 63) - 1

__all__ = ["BACKEND", "INT64_MAX", "holant_sum", "treewidth_dp"]
