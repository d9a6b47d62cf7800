"""Raster domain types and validators.

Probability maps are 2D float32 arrays with values in [0, 1]; binary maps
are 2D bool arrays. Both are plain numpy arrays indexed ``[y, x]``; pixel
coordinates elsewhere in the toolkit are (x, y) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProbabilityMap",
    "BinaryMap",
    "BoundarySegment",
    "ThresholdConfig",
    "as_probability_map",
    "as_binary_map",
    "validate_probability_map",
    "validate_binary_map",
    "has_2x2_block",
    "threshold",
]

# type aliases used in signatures; arrays are not subclassed
ProbabilityMap = np.ndarray
BinaryMap = np.ndarray

_NEIGHBORS8 = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]


def as_probability_map(data) -> ProbabilityMap:
    arr = np.asarray(data, dtype=np.float32)
    validate_probability_map(arr)
    return arr


def as_binary_map(data) -> BinaryMap:
    arr = np.asarray(data)
    if arr.dtype != np.bool_:
        arr = arr.astype(bool)
    validate_binary_map(arr)
    return arr


def validate_probability_map(p: np.ndarray) -> None:
    if p.ndim != 2:
        raise ValueError(f"probability map must be 2D, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise ValueError("probability map contains non-finite values")
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("probability map values must lie in [0, 1]")


def validate_binary_map(b: np.ndarray) -> None:
    if b.ndim != 2:
        raise ValueError(f"binary map must be 2D, got shape {b.shape}")
    if b.dtype != np.bool_:
        raise ValueError(f"binary map must be bool, got {b.dtype}")


def has_2x2_block(b: BinaryMap) -> bool:
    """True if any 2x2 window is all-ones (the map is not thin)."""
    if b.shape[0] < 2 or b.shape[1] < 2:
        return False
    return bool((b[:-1, :-1] & b[1:, :-1] & b[:-1, 1:] & b[1:, 1:]).any())


@dataclass(frozen=True)
class BoundarySegment:
    """Ordered pixel polyline; consecutive points are 8-adjacent.

    ``points`` is an (n, 2) int32 array of (x, y) coordinates.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int32)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("segment needs an (n, 2) array with n >= 1")
        if pts.shape[0] > 1:
            steps = np.abs(np.diff(pts, axis=0))
            if (steps.max(axis=1) > 1).any():
                raise ValueError("consecutive segment points must be 8-adjacent")
            if (steps.max(axis=1) == 0).any():
                raise ValueError("segment repeats a consecutive point")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def pixel_set(self) -> set[tuple[int, int]]:
        return {(int(x), int(y)) for x, y in self.points}


@dataclass(frozen=True)
class ThresholdConfig:
    """Cutoff applied to an NMS-thinned probability map.

    ``binary`` mode maps to {0, 1}; ``non-binary`` keeps surviving values.
    """

    T: float = 0.7
    mode: str = "binary"

    def __post_init__(self):
        if not 0.0 <= self.T <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.T}")
        if self.mode not in ("binary", "non-binary"):
            raise ValueError(f"unknown threshold mode {self.mode!r}")


def threshold(p: ProbabilityMap, cfg: ThresholdConfig):
    """Apply the cutoff; >= T survives (inclusive).

    Returns a BinaryMap in binary mode, a ProbabilityMap (values below T
    zeroed) in non-binary mode.
    """
    keep = p >= np.float32(cfg.T)
    if cfg.mode == "binary":
        return keep
    return np.where(keep, p, np.float32(0.0)).astype(np.float32)
