"""Kernel dispatch: compiled extension if available, numpy/pure-Python otherwise.

Set ``EPSNASH_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("EPSNASH_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

bfs_distances = _impl.bfs_distances
betweenness_sums = _impl.betweenness_sums
security_grid_nash = _impl.security_grid_nash

__all__ = ["BACKEND", "bfs_distances", "betweenness_sums", "security_grid_nash"]
