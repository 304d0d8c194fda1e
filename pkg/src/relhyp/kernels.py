"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when
``RELHYP_PURE_PYTHON=1`` is set, the pure-Python twin is used.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("RELHYP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _kernels_py


def _csr(indptr, indices):
    return np.ascontiguousarray(indptr, dtype=np.int64), np.ascontiguousarray(indices, dtype=np.int64)


def bfs_csr(indptr, indices, source, impl=None):
    ip, ix = _csr(indptr, indices)
    return (impl or _impl).bfs_csr(ip, ix, int(source))


def all_pairs_bfs(indptr, indices, impl=None):
    ip, ix = _csr(indptr, indices)
    return (impl or _impl).all_pairs_bfs(ip, ix)


def articulation_points(indptr, indices, impl=None):
    ip, ix = _csr(indptr, indices)
    return (impl or _impl).articulation_points(ip, ix)


def _tree_args(parent, depth, ids):
    return (np.ascontiguousarray(parent, dtype=np.int32),
            np.ascontiguousarray(depth, dtype=np.int32),
            np.ascontiguousarray(ids, dtype=np.int32))


def tree_area_scan(parent, depth, ids, impl=None):
    return (impl or _impl).tree_area_scan(*_tree_args(parent, depth, ids))


def tree_distance_matrix(parent, depth, ids, impl=None):
    return (impl or _impl).tree_distance_matrix(*_tree_args(parent, depth, ids))


def python_impl():
    return _kernels_py


def compiled_impl():
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
