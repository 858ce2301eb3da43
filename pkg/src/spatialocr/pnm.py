"""Binary PNM codecs: P5 (8-bit graymap) and P4 (bitmap).

P4 rows are packed most-significant bit first and padded to a byte
boundary; a set bit is black, which maps to a foreground pixel.
"""

import numpy as np

from .errors import PnmFormatError
from .fsutil import atomic_write
from .imaging import BinaryImage, GrayImage

_WHITESPACE = b" \t\r\n\x0b\x0c"


def _header_tokens(data, count):
    """Read ``count`` header tokens after the magic number.

    Returns the tokens and the offset of the first raster byte.
    """
    tokens = []
    pos = 2
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise PnmFormatError(f"truncated header at byte {pos}")
        token = data[start:pos]
        if not token.isdigit():
            raise PnmFormatError(f"bad header field {token!r} at byte {start}")
        tokens.append(int(token))
    if pos >= n or data[pos] not in _WHITESPACE:
        raise PnmFormatError(f"missing whitespace before raster at byte {pos}")
    return tokens, pos + 1


def decode(data):
    """Decode a P4 or P5 byte string into a BinaryImage or GrayImage."""
    data = bytes(data)
    magic = data[:2]
    if magic == b"P5":
        (width, height, maxval), pos = _header_tokens(data, 3)
        if not 0 < maxval < 256:
            raise PnmFormatError(f"unsupported maxval {maxval}; only 8-bit graymaps are read")
    elif magic == b"P4":
        (width, height), pos = _header_tokens(data, 2)
    else:
        raise PnmFormatError(f"unsupported magic {magic!r}; expected P4 or P5")
    if width < 1 or height < 1:
        raise PnmFormatError(f"empty raster {width}x{height}")

    if magic == b"P5":
        need = width * height
        raster = np.frombuffer(data, dtype=np.uint8, count=min(need, len(data) - pos), offset=pos)
        if raster.size < need:
            raise PnmFormatError(f"raster truncated: expected {need} bytes, got {raster.size}")
        pixels = raster.reshape(height, width)
        if maxval != 255:
            pixels = (pixels.astype(np.uint32) * 255 + maxval // 2) // maxval
            if np.any(pixels > 255):
                raise PnmFormatError("sample exceeds maxval")
        return GrayImage(pixels.astype(np.uint8))

    stride = (width + 7) // 8
    need = stride * height
    raster = np.frombuffer(data, dtype=np.uint8, count=min(need, len(data) - pos), offset=pos)
    if raster.size < need:
        raise PnmFormatError(f"raster truncated: expected {need} bytes, got {raster.size}")
    bits = np.unpackbits(raster.reshape(height, stride), axis=1, bitorder="big")[:, :width]
    return BinaryImage(bits.astype(bool))


def encode(img):
    """Encode a GrayImage as P5 or a BinaryImage as P4."""
    if isinstance(img, GrayImage):
        header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
        return header + img.pixels.tobytes()
    if isinstance(img, BinaryImage):
        header = f"P4\n{img.width} {img.height}\n".encode("ascii")
        packed = np.packbits(img.bits.astype(np.uint8), axis=1, bitorder="big")
        return header + packed.tobytes()
    raise TypeError(f"cannot encode {type(img).__name__}")


def read(path):
    with open(path, "rb") as fh:
        return decode(fh.read())


def write(path, img):
    atomic_write(path, encode(img))
