"""Binary morphology with directional line structuring elements.

Coordinates are ``(dx, dy)`` with ``y`` growing downward. Pixels outside
the raster are background for both erosion and dilation, and dilation
never grows the canvas.
"""

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from . import kernels
from .errors import InvalidParameterError
from .imaging import BinaryImage

ANGLES = (0, 45, 90, 135)
SWEEP_FRACTIONS = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8)

# unit step of the line in the positive direction, y downward
_STEP = {0: (1, 0), 45: (1, -1), 90: (0, -1), 135: (-1, -1)}


@dataclass(frozen=True)
class StructuringElement:
    theta: int
    length: int
    offsets: tuple

    def reflect(self):
        return StructuringElement(self.theta, self.length, tuple((-dx, -dy) for dx, dy in self.offsets))


def line_se(theta, mu):
    """Digital line of ``mu`` pixels through the origin at ``theta`` degrees.

    Odd lengths are centered on the origin; even lengths put the extra
    pixel on the positive side (+x at 0, -y at 90, and so on).
    """
    if theta not in _STEP:
        raise InvalidParameterError(f"unsupported angle {theta}; expected one of {ANGLES}")
    if mu < 1:
        raise InvalidParameterError(f"SE length must be >= 1, got {mu}")
    sx, sy = _STEP[theta]
    lo = -((mu - 1) // 2)
    return StructuringElement(theta, mu, tuple((k * sx, k * sy) for k in range(lo, lo + mu)))


def se_length(fraction, glyph_height):
    """``max(1, round(fraction * glyph_height))``, halves rounded away from zero."""
    if glyph_height < 1:
        raise InvalidParameterError(f"glyph height must be >= 1, got {glyph_height}")
    if not 0 < fraction <= 1:
        raise InvalidParameterError(f"SE fraction must be in (0, 1], got {fraction}")
    exact = Decimal(repr(float(fraction))) * glyph_height
    return max(1, int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP)))


def erode(img, se):
    return BinaryImage(kernels.erode(img.bits, se.offsets))


def dilate(img, se):
    return BinaryImage(kernels.dilate(img.bits, se.offsets))


def opening(img, se):
    return dilate(erode(img, se), se)


def closing(img, se):
    return erode(dilate(img, se), se)


def directional_open(img, se, op_order="opening"):
    """Directional filter used for stroke extraction.

    ``op_order="closing"`` applies dilation first, i.e. the operator order
    written literally in the original formulation; the default is the
    standard opening.
    """
    if op_order == "opening":
        return opening(img, se)
    if op_order == "closing":
        return closing(img, se)
    raise InvalidParameterError(f"op_order must be 'opening' or 'closing', got {op_order!r}")
