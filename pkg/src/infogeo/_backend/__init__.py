"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise the pure
NumPy fallback takes over with identical semantics. Set INFOGEO_BACKEND to
"python" or "native" to force a choice (forcing "native" raises if the
extension is missing, so CI can detect a broken build).
"""

import os

from . import fallback

_requested = os.environ.get("INFOGEO_BACKEND", "").strip().lower()

if _requested == "python":
    impl = fallback
elif _requested == "native":
    from . import _native as impl
else:
    try:
        from . import _native as impl
    except ImportError:
        impl = fallback

BACKEND = impl.NAME
psi_balanced = impl.psi_balanced
banded_apply = impl.banded_apply
dense_filter_loop = impl.dense_filter_loop

__all__ = ["BACKEND", "psi_balanced", "banded_apply", "dense_filter_loop", "fallback", "impl"]
