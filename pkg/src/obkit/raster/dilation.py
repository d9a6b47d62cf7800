"""Disk dilation of pixel point sets.

A pixel turns on iff it lies within Euclidean distance r of some source
point: the exact lattice disk, no anti-aliasing. Out-of-canvas points
contribute only the part of their disk that falls inside the canvas.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .._accel import NUMBA_ENABLED, njit
from .types import BinaryMap

__all__ = ["dilate_disk", "disk_offsets"]


def disk_offsets(r: int) -> np.ndarray:
    """(n, 2) array of integer (dx, dy) with dx^2 + dy^2 <= r^2."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    rng = np.arange(-r, r + 1)
    dx, dy = np.meshgrid(rng, rng)
    keep = dx * dx + dy * dy <= r * r
    return np.stack([dx[keep], dy[keep]], axis=1).astype(np.int64)


@njit(cache=True)
def _stamp_numba(out, points, offs):  # pragma: no cover - compiled
    h, w = out.shape
    for i in range(points.shape[0]):
        px = points[i, 0]
        py = points[i, 1]
        for j in range(offs.shape[0]):
            x = px + offs[j, 0]
            y = py + offs[j, 1]
            if 0 <= x < w and 0 <= y < h:
                out[y, x] = True


def _stamp_numpy(out: np.ndarray, points: np.ndarray, r: int) -> None:
    h, w = out.shape
    # pad so clipped points still contribute their in-canvas disk portion
    padded = np.zeros((h + 2 * r, w + 2 * r), dtype=bool)
    xs = points[:, 0] + r
    ys = points[:, 1] + r
    ok = (xs >= 0) & (xs < w + 2 * r) & (ys >= 0) & (ys < h + 2 * r)
    padded[ys[ok], xs[ok]] = True
    struct = np.zeros((2 * r + 1, 2 * r + 1), dtype=bool)
    offs = disk_offsets(r)
    struct[offs[:, 1] + r, offs[:, 0] + r] = True
    dil = ndimage.binary_dilation(padded, structure=struct)
    out |= dil[r : h + r, r : w + r]


def dilate_disk(points, r: int, canvas: tuple[int, int]) -> BinaryMap:
    """Dilate a point set with the radius-r lattice disk, clipped to canvas.

    ``points`` is an iterable of (x, y) pairs or an (n, 2) array;
    ``canvas`` is (width, height).
    """
    w, h = canvas
    out = np.zeros((h, w), dtype=bool)
    pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points)
    if pts.size == 0:
        return out
    pts = pts.reshape(-1, 2).astype(np.int64)
    if NUMBA_ENABLED:
        _stamp_numba(out, pts, disk_offsets(r))
    else:
        if r == 0:
            ok = (pts[:, 0] >= 0) & (pts[:, 0] < w) & (pts[:, 1] >= 0) & (pts[:, 1] < h)
            out[pts[ok, 1], pts[ok, 0]] = True
        else:
            _stamp_numpy(out, pts, r)
    return out
