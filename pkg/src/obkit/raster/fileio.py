"""Bit-exact raster file formats.

Float maps use the OBFMAP01 container: 8-byte magic ``OBFMAP01``, then
width and height as little-endian uint32, then width*height little-endian
float32 values in row-major order. Binary masks are stored as 8-bit
single-channel PNG with values {0, 255}.
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import ParseError
from .types import BinaryMap, ProbabilityMap, validate_probability_map

__all__ = [
    "MAGIC",
    "write_obfmap",
    "read_obfmap",
    "obfmap_bytes",
    "obfmap_from_bytes",
    "write_mask",
    "read_mask",
    "mask_png_bytes",
    "load_rgb",
    "write_rgb",
]

MAGIC = b"OBFMAP01"


def obfmap_bytes(p: ProbabilityMap, *, validate: bool = True) -> bytes:
    arr = np.ascontiguousarray(p, dtype="<f4")
    if validate:
        validate_probability_map(arr)
    h, w = arr.shape
    return MAGIC + struct.pack("<II", w, h) + arr.tobytes()


def obfmap_from_bytes(blob: bytes, *, validate: bool = True) -> ProbabilityMap:
    if len(blob) < 16 or blob[:8] != MAGIC:
        raise ParseError("not an OBFMAP01 stream (bad magic)")
    w, h = struct.unpack("<II", blob[8:16])
    expected = 16 + 4 * w * h
    if len(blob) != expected:
        raise ParseError(f"OBFMAP01 payload length {len(blob)} != expected {expected}")
    arr = np.frombuffer(blob, dtype="<f4", offset=16).reshape(h, w).copy()
    if validate:
        validate_probability_map(arr)
    return arr


def write_obfmap(path, p: ProbabilityMap, *, validate: bool = True) -> None:
    Path(path).write_bytes(obfmap_bytes(p, validate=validate))


def read_obfmap(path, *, validate: bool = True) -> ProbabilityMap:
    return obfmap_from_bytes(Path(path).read_bytes(), validate=validate)


def mask_png_bytes(b: BinaryMap) -> bytes:
    img = Image.fromarray(np.where(b, 255, 0).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def write_mask(path, b: BinaryMap) -> None:
    Path(path).write_bytes(mask_png_bytes(b))


def read_mask(path) -> BinaryMap:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    values = np.unique(arr)
    if not np.isin(values, (0, 255)).all():
        raise ParseError(f"mask {path} contains values other than {{0, 255}}")
    return arr == 255


def load_rgb(path) -> np.ndarray:
    """Load any standard raster as (h, w, 3) uint8."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


def write_rgb(path, rgb: np.ndarray) -> None:
    Image.fromarray(np.asarray(rgb, dtype=np.uint8), mode="RGB").save(path, format="PNG")
