"""Raster containers and the preprocessing chain.

Grayscale scans are median filtered, thresholded with Otsu's method and
cropped to the glyph's bounding box before any feature is computed.
Rasters are stored as read-only numpy arrays indexed ``[row, column]``.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmptyGlyphError, InvalidParameterError


def _frozen(array, dtype):
    a = np.array(array, dtype=dtype, copy=True, order="C")
    a.setflags(write=False)
    return a


class GrayImage:
    """8-bit grayscale raster, 0 = black ink, 255 = white background."""

    __slots__ = ("pixels",)

    def __init__(self, pixels):
        a = np.asarray(pixels)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise InvalidParameterError(f"expected a non-empty 2-D raster, got shape {a.shape}")
        if a.dtype != np.uint8:
            if np.any(a < 0) or np.any(a > 255):
                raise InvalidParameterError("intensities must lie in [0, 255]")
        self.pixels = _frozen(a, np.uint8)

    @classmethod
    def from_sequence(cls, width, height, values):
        values = np.asarray(values)
        if values.size != width * height:
            raise InvalidParameterError(
                f"expected {width * height} pixels for {width}x{height}, got {values.size}"
            )
        return cls(values.reshape(height, width))

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    def __eq__(self, other):
        return isinstance(other, GrayImage) and np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


class BinaryImage:
    """Bilevel raster; ``True`` marks a foreground (ink) pixel."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        a = np.asarray(bits)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise InvalidParameterError(f"expected a non-empty 2-D raster, got shape {a.shape}")
        self.bits = _frozen(a != 0, bool)

    @classmethod
    def from_sequence(cls, width, height, values):
        values = np.asarray(values)
        if values.size != width * height:
            raise InvalidParameterError(
                f"expected {width * height} bits for {width}x{height}, got {values.size}"
            )
        return cls(values.reshape(height, width))

    @classmethod
    def from_strings(cls, rows, on="#"):
        """Build from text rows, e.g. ``["#..", ".#."]``. Handy in tests."""
        return cls(np.array([[c == on for c in row] for row in rows], dtype=bool))

    @property
    def width(self):
        return self.bits.shape[1]

    @property
    def height(self):
        return self.bits.shape[0]

    @property
    def on_count(self):
        return int(np.count_nonzero(self.bits))

    def complement(self):
        return BinaryImage(~self.bits)

    def as_u8(self):
        return self.bits.view(np.uint8)

    def to_strings(self, on="#", off="."):
        return ["".join(on if b else off for b in row) for row in self.bits]

    def __eq__(self, other):
        return isinstance(other, BinaryImage) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bits.shape, self.bits.tobytes()))

    def __repr__(self):
        return f"BinaryImage({self.width}x{self.height}, on={self.on_count})"


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive pixel box: columns ``left..right``, rows ``top..bottom``."""

    left: int
    top: int
    right: int
    bottom: int

    def __post_init__(self):
        if self.left > self.right or self.top > self.bottom:
            raise InvalidParameterError(f"degenerate box {self}")

    @property
    def width(self):
        return self.right - self.left + 1

    @property
    def height(self):
        return self.bottom - self.top + 1

    @property
    def area(self):
        return self.width * self.height


@dataclass(frozen=True, eq=False)
class ComponentSet:
    """Connected-component labeling of a binary raster.

    ``labels`` is 0 for background and ``1..count`` otherwise; components
    are numbered by their first pixel in raster order. ``sizes[i]`` and
    ``boxes[i]`` describe component ``i + 1``.
    """

    labels: np.ndarray
    count: int
    sizes: tuple
    boxes: tuple

    def __eq__(self, other):
        return (
            isinstance(other, ComponentSet)
            and self.count == other.count
            and np.array_equal(self.labels, other.labels)
            and self.sizes == other.sizes
            and self.boxes == other.boxes
        )


def median_filter(img, window=3):
    """Median of the ``window`` x ``window`` neighborhood, edges replicated."""
    if window not in (3, 5):
        raise InvalidParameterError(f"median window must be 3 or 5, got {window}")
    return GrayImage(kernels.median_filter(img.pixels, window))


def otsu_threshold(img):
    """Threshold ``t`` maximizing between-class variance of ``{<= t}`` vs ``{> t}``.

    The criterion is evaluated in exact integer arithmetic: with ``n0``
    pixels and intensity sum ``s0`` at or below ``t``, the between-class
    variance is proportional to ``(N*s0 - n0*S)**2 / (n0*n1)``. Ties resolve
    to the smallest threshold, so a constant image yields 0.
    """
    hist = np.bincount(img.pixels.ravel(), minlength=256).tolist()
    total_n = sum(hist)
    total_s = sum(i * c for i, c in enumerate(hist))
    best_t, best_num, best_den = 0, 0, 1
    n0 = s0 = 0
    for t in range(256):
        n0 += hist[t]
        s0 += t * hist[t]
        n1 = total_n - n0
        if n0 == 0 or n1 == 0:
            continue
        num = (total_n * s0 - n0 * total_s) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def binarize(img, t):
    """Dark pixels (``<= t``) become foreground."""
    if not 0 <= t <= 255:
        raise InvalidParameterError(f"threshold must be in [0, 255], got {t}")
    return BinaryImage(img.pixels <= t)


def bounding_box(img):
    rows = np.flatnonzero(img.bits.any(axis=1))
    if rows.size == 0:
        raise EmptyGlyphError("glyph has no on-pixels")
    cols = np.flatnonzero(img.bits.any(axis=0))
    return BoundingBox(int(cols[0]), int(rows[0]), int(cols[-1]), int(rows[-1]))


def crop(img, box):
    if box.left < 0 or box.top < 0 or box.right >= img.width or box.bottom >= img.height:
        raise InvalidParameterError(f"{box} lies outside a {img.width}x{img.height} raster")
    return BinaryImage(img.bits[box.top:box.bottom + 1, box.left:box.right + 1])


def crop_to_glyph(img):
    return crop(img, bounding_box(img))


def fill_holes(img):
    """Turn on every background region not 4-connected to the raster border."""
    background = ~img.bits
    labels, count = kernels.label(background, 4)
    if count == 0:
        return img
    border = np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
    outside = np.zeros(count + 1, dtype=bool)
    outside[border] = True
    outside[0] = False
    return BinaryImage(img.bits | ~outside[labels] & background)


def connected_components(img, connectivity=8):
    if connectivity not in (4, 8):
        raise InvalidParameterError(f"connectivity must be 4 or 8, got {connectivity}")
    labels, count = kernels.label(img.bits, connectivity)
    labels.setflags(write=False)
    if count == 0:
        return ComponentSet(labels, 0, (), ())
    flat = labels.ravel()
    sizes = np.bincount(flat, minlength=count + 1)[1:]
    ys, xs = np.divmod(np.arange(flat.size), img.width)
    fg = flat > 0
    lab, ys, xs = flat[fg] - 1, ys[fg], xs[fg]
    left = np.full(count, img.width)
    top = np.full(count, img.height)
    right = np.full(count, -1)
    bottom = np.full(count, -1)
    np.minimum.at(left, lab, xs)
    np.minimum.at(top, lab, ys)
    np.maximum.at(right, lab, xs)
    np.maximum.at(bottom, lab, ys)
    boxes = tuple(
        BoundingBox(int(a), int(b), int(c), int(d)) for a, b, c, d in zip(left, top, right, bottom)
    )
    return ComponentSet(labels, int(count), tuple(int(s) for s in sizes), boxes)


def preprocess(img, window=3):
    """Median filter, Otsu binarization and bounding-box crop of a scanned glyph."""
    smoothed = median_filter(img, window)
    binary = binarize(smoothed, otsu_threshold(smoothed))
    return crop_to_glyph(binary)
