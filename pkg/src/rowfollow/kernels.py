"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementations in ``_pykernels`` are used. Setting ``ROWFOLLOW_PURE=1``
forces the numpy path.
"""
import os

from . import _pykernels

if os.environ.get("ROWFOLLOW_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "numpy"

raycast_discs = _impl.raycast_discs
zero_runs = _impl.zero_runs

__all__ = ["BACKEND", "raycast_discs", "zero_runs"]
