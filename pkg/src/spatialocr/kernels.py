"""Backend selection for the pixel kernels.

The compiled extension is used when it imports cleanly; otherwise the numpy
fallback is used. Setting ``SPATIALOCR_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("SPATIALOCR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels


def _u8(a):
    return np.ascontiguousarray(a, dtype=np.uint8)


def _offsets(offsets):
    return np.ascontiguousarray(np.asarray(offsets, dtype=np.int32).reshape(-1, 2))


def erode(src, offsets, impl=None):
    return (impl or _impl).erode(_u8(src), _offsets(offsets))


def dilate(src, offsets, impl=None):
    return (impl or _impl).dilate(_u8(src), _offsets(offsets))


def label(src, connectivity, impl=None):
    labels, count = (impl or _impl).label(_u8(src), int(connectivity))
    return labels, int(count)


def median_filter(src, window, impl=None):
    return (impl or _impl).median_filter(_u8(src), int(window))


def available_backends():
    """Map backend name to implementation module for every importable backend."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
