# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pixel kernels. Signatures mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def erode(const cnp.uint8_t[:, ::1] src, const cnp.int32_t[:, ::1] offsets):
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1], m = offsets.shape[0]
    cdef Py_ssize_t x, y, k, xx, yy
    cdef cnp.uint8_t on
    out = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] dst = out
    for y in range(h):
        for x in range(w):
            on = 1
            for k in range(m):
                xx = x + offsets[k, 0]
                yy = y + offsets[k, 1]
                if xx < 0 or xx >= w or yy < 0 or yy >= h or src[yy, xx] == 0:
                    on = 0
                    break
            dst[y, x] = on
    return out


def dilate(const cnp.uint8_t[:, ::1] src, const cnp.int32_t[:, ::1] offsets):
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1], m = offsets.shape[0]
    cdef Py_ssize_t x, y, k, xx, yy
    out = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] dst = out
    for y in range(h):
        for x in range(w):
            for k in range(m):
                xx = x - offsets[k, 0]
                yy = y - offsets[k, 1]
                if 0 <= xx < w and 0 <= yy < h and src[yy, xx] != 0:
                    dst[y, x] = 1
                    break
    return out


cdef inline Py_ssize_t _find(cnp.int32_t[::1] parent, Py_ssize_t i) nogil:
    cdef Py_ssize_t root = i, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


cdef inline void _union(cnp.int32_t[::1] parent, Py_ssize_t a, Py_ssize_t b) nogil:
    a = _find(parent, a)
    b = _find(parent, b)
    if a < b:
        parent[b] = a
    elif b < a:
        parent[a] = b


def label(const cnp.uint8_t[:, ::1] src, int connectivity):
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    cdef Py_ssize_t x, y, cur, nxt = 1, root
    cdef bint diag = connectivity == 8
    provisional = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] lab = provisional
    parent_arr = np.zeros(h * w + 1, dtype=np.int32)
    cdef cnp.int32_t[::1] parent = parent_arr

    for y in range(h):
        for x in range(w):
            if src[y, x] == 0:
                continue
            cur = 0
            if x > 0 and lab[y, x - 1]:
                cur = lab[y, x - 1]
            if y > 0:
                if lab[y - 1, x]:
                    if cur:
                        _union(parent, cur, lab[y - 1, x])
                    else:
                        cur = lab[y - 1, x]
                if diag and x > 0 and lab[y - 1, x - 1]:
                    if cur:
                        _union(parent, cur, lab[y - 1, x - 1])
                    else:
                        cur = lab[y - 1, x - 1]
                if diag and x + 1 < w and lab[y - 1, x + 1]:
                    if cur:
                        _union(parent, cur, lab[y - 1, x + 1])
                    else:
                        cur = lab[y - 1, x + 1]
            if not cur:
                cur = nxt
                parent[cur] = cur
                nxt += 1
            lab[y, x] = cur

    # final ids follow the first raster-order pixel of each component
    remap_arr = np.zeros(nxt, dtype=np.int32)
    cdef cnp.int32_t[::1] remap = remap_arr
    cdef int count = 0
    for y in range(h):
        for x in range(w):
            if lab[y, x]:
                root = _find(parent, lab[y, x])
                if remap[root] == 0:
                    count += 1
                    remap[root] = count
                lab[y, x] = remap[root]
    return provisional, count


def median_filter(const cnp.uint8_t[:, ::1] src, int window):
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    cdef Py_ssize_t x, y, i, j, n, k, xx, yy
    cdef int r = window // 2
    cdef cnp.uint8_t buf[25]
    cdef cnp.uint8_t v
    out = np.empty((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] dst = out
    for y in range(h):
        for x in range(w):
            n = 0
            for j in range(-r, r + 1):
                yy = y + j
                if yy < 0:
                    yy = 0
                elif yy >= h:
                    yy = h - 1
                for i in range(-r, r + 1):
                    xx = x + i
                    if xx < 0:
                        xx = 0
                    elif xx >= w:
                        xx = w - 1
                    v = src[yy, xx]
                    k = n
                    while k > 0 and buf[k - 1] > v:
                        buf[k] = buf[k - 1]
                        k -= 1
                    buf[k] = v
                    n += 1
            dst[y, x] = buf[n // 2]
    return out
