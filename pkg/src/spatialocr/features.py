"""Thirteen spatial features of a printed glyph.

The vector is, in order: the average stroke length at 0, 45, 90 and 135
degrees, the summed stroke density, the hole-filled on-pixel ratio, the
aspect ratio, the moment-ellipse eccentricity, the extent, and the
left/right/top/bottom background profiles.

Strokes are the 8-connected components of the glyph after a directional
opening with a line whose length is a fraction of the glyph height.
"""

import csv
import io
import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .errors import EmptyGlyphError, InvalidParameterError
from .imaging import bounding_box, connected_components, crop, fill_holes
from .morphology import ANGLES, directional_open, line_se, se_length

FEATURE_NAMES = (
    "omega0", "omega45", "omega90", "omega135", "density", "eta", "beta",
    "ecc", "extent", "pleft", "pright", "ptop", "pbottom",
)
ECCENTRICITY_CAP = 1e6
_DEGENERATE = 1e-12


@dataclass(frozen=True)
class FeatureVector:
    omega_0: float
    omega_45: float
    omega_90: float
    omega_135: float
    stroke_density: float
    on_pixel_ratio: float
    aspect_ratio: float
    eccentricity: float
    extent: float
    profile_left: float
    profile_right: float
    profile_top: float
    profile_bottom: float

    def as_array(self):
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, values):
        values = [float(v) for v in values]
        if len(values) != len(fields(cls)):
            raise InvalidParameterError(f"expected {len(fields(cls))} values, got {len(values)}")
        return cls(*values)

    def __len__(self):
        return len(FEATURE_NAMES)


@dataclass(frozen=True, eq=False)
class DirectionalStrokes:
    theta: int
    se_length: int
    n: int
    lengths: tuple
    components: object  # ComponentSet of the opened glyph


def _require_ink(img):
    if not img.bits.any():
        raise EmptyGlyphError("glyph has no on-pixels")


def directional_strokes(img, theta, fraction, op_order="opening"):
    _require_ink(img)
    mu = se_length(fraction, img.height)
    opened = directional_open(img, line_se(theta, mu), op_order)
    comps = connected_components(opened, 8)
    return DirectionalStrokes(theta, mu, comps.count, comps.sizes, comps)


def avg_stroke_length(ds):
    """Mean stroke pixel count; 0.0 for a direction with no strokes."""
    if ds.n == 0:
        return 0.0
    return sum(ds.lengths) / ds.n


def avg_stroke_density(per_theta, width):
    """Stroke count per unit width, summed over the directions."""
    if width < 1:
        raise InvalidParameterError(f"width must be >= 1, got {width}")
    return sum(ds.n / width for ds in per_theta)


def on_pixel_ratio(img):
    filled = fill_holes(img)
    return filled.on_count / (img.width * img.height)


def aspect_ratio(box):
    return box.width / box.height


def _covariance_eigenvalues(img):
    ys, xs = np.nonzero(img.bits)
    xs = xs.astype(float)
    ys = ys.astype(float)
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    n = xs.size
    mu20 = float(np.dot(dx, dx)) / n
    mu02 = float(np.dot(dy, dy)) / n
    mu11 = float(np.dot(dx, dy)) / n
    half_trace = (mu20 + mu02) / 2
    spread = math.hypot((mu20 - mu02) / 2, mu11)
    return half_trace + spread, max(half_trace - spread, 0.0)


def eccentricity(img):
    """Major over minor axis of the ellipse with the glyph's second moments.

    A single pixel is isotropic (1.0); a collinear pixel set is capped at
    ``ECCENTRICITY_CAP``.
    """
    _require_ink(img)
    big, small = _covariance_eigenvalues(img)
    if big <= _DEGENERATE:
        return 1.0
    if small <= _DEGENERATE:
        return ECCENTRICITY_CAP
    return min(math.sqrt(big / small), ECCENTRICITY_CAP)


def extent(img, box):
    _require_ink(img)
    on = int(np.count_nonzero(img.bits[box.top:box.bottom + 1, box.left:box.right + 1]))
    return on / box.area


def raw_profiles(img):
    """Background run lengths scanned inward from each side, summed.

    A blank row (column) between inked ones contributes its full length to
    both of its opposite scans. Blank margins outside the glyph's bounding
    box contribute nothing.
    """
    bits = img.bits
    h, w = bits.shape
    rows_any = bits.any(axis=1)
    cols_any = bits.any(axis=0)
    if not rows_any.any():
        return 0, 0, 0, 0
    box = bounding_box(img)
    rows_inside = np.zeros(h, bool)
    rows_inside[box.top:box.bottom + 1] = True
    cols_inside = np.zeros(w, bool)
    cols_inside[box.left:box.right + 1] = True
    blank_row = np.where(rows_inside, w, 0)
    blank_col = np.where(cols_inside, h, 0)
    left = np.where(rows_any, bits.argmax(axis=1), blank_row)
    right = np.where(rows_any, bits[:, ::-1].argmax(axis=1), blank_row)
    top = np.where(cols_any, bits.argmax(axis=0), blank_col)
    bottom = np.where(cols_any, bits[::-1, :].argmax(axis=0), blank_col)
    return int(left.sum()), int(right.sum()), int(top.sum()), int(bottom.sum())


def directional_profiles(img):
    area = img.width * img.height
    return tuple(count / area for count in raw_profiles(img))


def extract_features(img, fraction=0.7, op_order="opening"):
    """Crop ``img`` to its glyph and compute the full feature vector."""
    box = bounding_box(img)
    glyph = crop(img, box)
    full = bounding_box(glyph)
    strokes = [directional_strokes(glyph, theta, fraction, op_order) for theta in ANGLES]
    return FeatureVector(
        *(avg_stroke_length(ds) for ds in strokes),
        avg_stroke_density(strokes, glyph.width),
        on_pixel_ratio(glyph),
        aspect_ratio(full),
        eccentricity(glyph),
        extent(glyph, full),
        *directional_profiles(glyph),
    )


@dataclass(frozen=True)
class NormalizationStats:
    """Per-dimension min/max over a training set."""

    minimum: tuple
    maximum: tuple

    @property
    def constant(self):
        return tuple(hi == lo for lo, hi in zip(self.minimum, self.maximum))

    def apply(self, x):
        """Min-max scale rows of ``x`` into [0, 1]; constant dims become 0.5."""
        x = np.asarray(x, dtype=float)
        lo = np.array(self.minimum)
        hi = np.array(self.maximum)
        span = hi - lo
        const = span == 0
        scaled = (x - lo) / np.where(const, 1.0, span)
        scaled = np.clip(scaled, 0.0, 1.0)
        return np.where(const, 0.5, scaled)


def _as_matrix(vectors):
    rows = [v.as_array() if isinstance(v, FeatureVector) else np.asarray(v, dtype=float) for v in vectors]
    return np.vstack(rows) if rows else np.empty((0, len(FEATURE_NAMES)))


def fit_normalization(train):
    x = _as_matrix(train)
    if x.shape[0] == 0:
        raise InvalidParameterError("cannot fit normalization on an empty training set")
    return NormalizationStats(
        tuple(float(v) for v in x.min(axis=0)), tuple(float(v) for v in x.max(axis=0))
    )


def apply_normalization(v, stats):
    if isinstance(v, FeatureVector):
        return FeatureVector.from_array(stats.apply(v.as_array()))
    return stats.apply(v)


CSV_HEADER = ("label", "style", "size") + FEATURE_NAMES


def features_csv(samples, vectors):
    """Feature table as CSV text, values to 9 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for s, v in zip(samples, vectors):
        writer.writerow([s.label, s.style, format(float(s.size_pt), "g")] + [format(x, ".9g") for x in v.as_array()])
    return buf.getvalue()
