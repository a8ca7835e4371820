"""Minimal deterministic PNG codec for 8-bit RGB images.

Encoder settings are fixed so that identical pixel buffers always produce
identical bytes: color type 2 (truecolor), bit depth 8, no interlace, no
ancillary chunks, filter type 0 on every scanline, zlib level 6.

The decoder accepts any non-interlaced 8-bit RGB PNG (all five scanline
filter types), which is enough to round-trip our own output and to read
back files for verification.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import ChannelscopeError
from .render import RasterImage

__all__ = ["encode_png", "decode_png", "PngFormatError"]

_SIGNATURE = b"\x89PNG\r\n\x1a\n"


class PngFormatError(ChannelscopeError):
    """The byte stream is not a PNG this codec can handle."""


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
    )


def encode_png(img: RasterImage) -> bytes:
    """Encode to PNG; identical images yield identical bytes."""
    h, w = img.height, img.width
    pixels = img.pixels
    if pixels.shape != (h, w, 3) or pixels.dtype != np.uint8:
        raise PngFormatError(f"expected ({h}, {w}, 3) uint8 pixels, got {pixels.shape} {pixels.dtype}")
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    raw = np.empty((h, 1 + w * 3), dtype=np.uint8)
    raw[:, 0] = 0  # filter type None on every scanline
    raw[:, 1:] = pixels.reshape(h, w * 3)
    idat = zlib.compress(raw.tobytes(), 6)
    return _SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    return b if pb <= pc else c


def _defilter(data: bytes, w: int, h: int) -> np.ndarray:
    stride = w * 3
    out = np.zeros((h, stride), dtype=np.uint8)
    pos = 0
    for row in range(h):
        ftype = data[pos]
        line = np.frombuffer(data, dtype=np.uint8, count=stride, offset=pos + 1).copy()
        pos += 1 + stride
        prev = out[row - 1] if row > 0 else np.zeros(stride, dtype=np.uint8)
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub
            for i in range(3, stride):
                line[i] = (int(line[i]) + int(line[i - 3])) & 0xFF
        elif ftype == 2:  # Up
            line = ((line.astype(np.int32) + prev.astype(np.int32)) & 0xFF).astype(np.uint8)
        elif ftype == 3:  # Average
            for i in range(stride):
                left = int(line[i - 3]) if i >= 3 else 0
                line[i] = (int(line[i]) + (left + int(prev[i])) // 2) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(stride):
                left = int(line[i - 3]) if i >= 3 else 0
                upleft = int(prev[i - 3]) if i >= 3 else 0
                line[i] = (int(line[i]) + _paeth(left, int(prev[i]), upleft)) & 0xFF
        else:
            raise PngFormatError(f"unsupported scanline filter {ftype}")
        out[row] = line
    return out.reshape(h, w, 3)


def decode_png(data: bytes) -> RasterImage:
    """Decode a non-interlaced 8-bit RGB PNG."""
    if data[:8] != _SIGNATURE:
        raise PngFormatError("missing PNG signature")
    pos = 8
    width = height = None
    idat = b""
    while pos < len(data):
        if pos + 8 > len(data):
            raise PngFormatError("truncated chunk header")
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        if len(payload) != length:
            raise PngFormatError(f"truncated {tag!r} chunk")
        pos += 12 + length
        if tag == b"IHDR":
            width, height, depth, ctype, comp, filt, interlace = struct.unpack(">IIBBBBB", payload)
            if (depth, ctype, comp, filt, interlace) != (8, 2, 0, 0, 0):
                raise PngFormatError(
                    "only 8-bit truecolor non-interlaced PNGs are supported, got "
                    f"depth={depth} color={ctype} interlace={interlace}"
                )
        elif tag == b"IDAT":
            idat += payload
        elif tag == b"IEND":
            break
    if width is None:
        raise PngFormatError("missing IHDR")
    try:
        raw = zlib.decompress(idat)
    except zlib.error as exc:
        raise PngFormatError(f"corrupt image data: {exc}") from exc
    if len(raw) != height * (1 + width * 3):
        raise PngFormatError("decompressed size does not match dimensions")
    pixels = _defilter(raw, width, height)
    return RasterImage(width=width, height=height, pixels=pixels)
