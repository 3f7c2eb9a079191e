"""Backend selection for the BFS kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module is used.  Setting ``PROJKIT_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("PROJKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # pragma: no cover - depends on build
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"


def bfs(indptr, indices, source, blocked=None):
    return _impl.bfs(indptr, indices, int(source), blocked)


def bfs_many(indptr, indices, sources, blocked=None):
    return _impl.bfs_many(indptr, indices, sources, blocked)


def compiled_available():
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
