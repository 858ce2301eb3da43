"""Pure-numpy fallback for the compiled pixel kernels.

Every function here takes and returns C-contiguous ``uint8`` rasters and
must agree bit-for-bit with ``_ckernels``.
"""

from collections import deque

import numpy as np


def _shifted(src, dx, dy):
    """Return ``s`` with ``s[y, x] = src[y + dy, x + dx]``, zero outside."""
    h, w = src.shape
    out = np.zeros_like(src)
    ys, yd = (slice(dy, h), slice(0, h - dy)) if dy >= 0 else (slice(0, h + dy), slice(-dy, h))
    xs, xd = (slice(dx, w), slice(0, w - dx)) if dx >= 0 else (slice(0, w + dx), slice(-dx, w))
    if abs(dy) < h and abs(dx) < w:
        out[yd, xd] = src[ys, xs]
    return out


def erode(src, offsets):
    out = np.ones_like(src)
    for dx, dy in offsets:
        out &= _shifted(src, int(dx), int(dy))
    return out


def dilate(src, offsets):
    out = np.zeros_like(src)
    for dx, dy in offsets:
        out |= _shifted(src, -int(dx), -int(dy))
    return out


def label(src, connectivity):
    h, w = src.shape
    labels = np.zeros((h, w), dtype=np.int32)
    if connectivity == 8:
        steps = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]
    else:
        steps = [(0, -1), (-1, 0), (1, 0), (0, 1)]
    count = 0
    for y0, x0 in zip(*np.nonzero(src)):
        if labels[y0, x0]:
            continue
        count += 1
        labels[y0, x0] = count
        queue = deque([(y0, x0)])
        while queue:
            y, x = queue.popleft()
            for dx, dy in steps:
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and src[yy, xx] and not labels[yy, xx]:
                    labels[yy, xx] = count
                    queue.append((yy, xx))
    return labels, count


def median_filter(src, window):
    r = window // 2
    padded = np.pad(src, r, mode="edge")
    view = np.lib.stride_tricks.sliding_window_view(padded, (window, window))
    flat = view.reshape(src.shape[0], src.shape[1], window * window)
    return np.ascontiguousarray(np.sort(flat, axis=-1)[..., (window * window) // 2])
