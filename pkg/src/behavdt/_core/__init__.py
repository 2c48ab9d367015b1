"""Split-scoring kernels.

The compiled ``_fast`` extension is used when it was built; otherwise the
numpy implementation in ``_slow`` is loaded. Set ``BEHAVDT_PURE=1`` to force
the fallback.
"""

import os

from . import _slow

BACKEND = "python"

if os.environ.get("BEHAVDT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _fast as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _slow
else:
    _impl = _slow

class_counts = _impl.class_counts
contingency = _impl.contingency
entropy_counts = _impl.entropy_counts
split_gains = _impl.split_gains

__all__ = ["BACKEND", "class_counts", "contingency", "entropy_counts", "split_gains"]
