"""Hot loops with a compiled implementation and a pure-Python fallback.

The compiled module is used when it was built at install time; setting
``CTN_MBQC_PURE_PYTHON=1`` forces the fallback. ``BACKEND`` names the one
in use.
"""

import os

from . import _fallback

if os.environ.get("CTN_MBQC_PURE_PYTHON") == "1":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

label_components = _impl.label_components
bfs_path = _impl.bfs_path
walk_hits = _impl.walk_hits

__all__ = ["BACKEND", "label_components", "bfs_path", "walk_hits", "_fallback"]
