"""Binary PGM (P5) files for offline inspection of masks and depth frames.

Masks are written 8-bit with vegetation = 255 and background = 0.
Depth frames are written 16-bit big-endian in millimeters; 0 encodes NO_RETURN
and ranges are clamped to 65534 mm.
"""
import re

import numpy as np

from .masks import NO_RETURN, as_depth, as_mask

DEPTH_MAX_MM = 65534

_HEADER = re.compile(rb"P5\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s")


def write_pgm(path, image, maxval):
    image = np.asarray(image)
    h, w = image.shape
    dtype = ">u2" if maxval > 255 else "u1"
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n%d\n" % (w, h, maxval))
        f.write(image.astype(dtype).tobytes())


def read_pgm(path):
    """Return ``(image, maxval)`` for a binary PGM file."""
    with open(path, "rb") as f:
        data = f.read()
    m = _HEADER.match(data)
    if m is None:
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    w, h, maxval = (int(g) for g in m.groups())
    dtype = ">u2" if maxval > 255 else "u1"
    count = w * h
    pixels = np.frombuffer(data, dtype=dtype, count=count, offset=m.end())
    return pixels.reshape(h, w).astype(np.int64), maxval


def write_mask_pgm(path, mask):
    write_pgm(path, as_mask(mask) * 255, 255)


def read_mask_pgm(path):
    image, maxval = read_pgm(path)
    return (image > maxval // 2).astype(np.uint8)


def write_depth_pgm(path, depth):
    depth = as_depth(depth)
    mm = np.zeros(depth.shape, dtype=np.int64)
    valid = np.isfinite(depth)
    mm[valid] = np.clip(np.floor(depth[valid] * 1000.0 + 0.5), 1, DEPTH_MAX_MM)
    write_pgm(path, mm, 65535)


def read_depth_pgm(path):
    image, _ = read_pgm(path)
    depth = image.astype(np.float64) / 1000.0
    depth[image == 0] = NO_RETURN
    return depth
