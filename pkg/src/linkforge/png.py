"""Minimal deterministic PNG codec.

The writer emits exactly IHDR + one IDAT (zlib level 6, filter 0 rows) +
IEND, so identical pixels give identical bytes on every run and platform.
The reader handles the subset this toolkit produces or is pointed at:
8-bit non-interlaced grayscale/RGB/RGBA with any standard row filter.
"""

import struct
import zlib

import numpy as np

_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_ZLIB_LEVEL = 6


def _chunk(tag, payload):
    return (struct.pack(">I", len(payload)) + tag + payload
            + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF))


def encode(img):
    """PNG bytes for an (h, w, 3) uint8 array."""
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ValueError("expected (h, w, 3) uint8 image")
    h, w = img.shape[:2]
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)  # 8-bit truecolor
    raw = b"".join(b"\x00" + img[y].tobytes() for y in range(h))
    idat = zlib.compress(raw, _ZLIB_LEVEL)
    return _SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def write(path, img):
    with open(path, "wb") as f:
        f.write(encode(img))


def decode(data):
    """(h, w, 3) uint8 array from PNG bytes."""
    if data[:8] != _SIGNATURE:
        raise ValueError("not a PNG file")
    pos = 8
    ihdr = None
    idat = []
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos:pos + 4])
        tag = data[pos + 4:pos + 8]
        payload = data[pos + 8:pos + 8 + length]
        pos += 12 + length
        if tag == b"IHDR":
            ihdr = struct.unpack(">IIBBBBB", payload)
        elif tag == b"IDAT":
            idat.append(payload)
        elif tag == b"IEND":
            break
    if ihdr is None or not idat:
        raise ValueError("truncated PNG")
    w, h, depth, color, _, _, interlace = ihdr
    if depth != 8 or interlace != 0:
        raise ValueError("unsupported PNG variant (need 8-bit, non-interlaced)")
    channels = {0: 1, 2: 3, 6: 4}.get(color)
    if channels is None:
        raise ValueError(f"unsupported PNG color type {color}")
    raw = zlib.decompress(b"".join(idat))
    stride = w * channels
    img = np.empty((h, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    pos = 0
    for y in range(h):
        filt = raw[pos]
        row = np.frombuffer(raw[pos + 1:pos + 1 + stride], dtype=np.uint8).copy()
        pos += 1 + stride
        img[y] = _unfilter(filt, row, prev, channels)
        prev = img[y]
    img = img.reshape(h, w, channels)
    if channels == 1:
        img = np.repeat(img, 3, axis=2)
    elif channels == 4:
        img = img[:, :, :3].copy()
    return img


def _unfilter(filt, row, prev, bpp):
    if filt == 0:
        return row
    if filt == 2:  # up
        return (row.astype(np.int32) + prev).astype(np.uint8)
    out = np.empty_like(row)
    for i in range(len(row)):
        left = int(out[i - bpp]) if i >= bpp else 0
        up = int(prev[i])
        ul = int(prev[i - bpp]) if i >= bpp else 0
        if filt == 1:
            pred = left
        elif filt == 3:
            pred = (left + up) // 2
        elif filt == 4:
            p = left + up - ul
            pa, pb, pc = abs(p - left), abs(p - up), abs(p - ul)
            pred = left if pa <= pb and pa <= pc else (up if pb <= pc else ul)
        else:
            raise ValueError(f"unknown PNG filter {filt}")
        out[i] = (int(row[i]) + pred) & 0xFF
    return out


def read(path):
    with open(path, "rb") as f:
        return decode(f.read())
