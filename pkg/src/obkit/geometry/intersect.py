"""Watertight ray-triangle intersection.

Rays are transformed into a shear-aligned space where edge functions are
evaluated exactly the same way for every triangle sharing an edge, so a
ray crossing a shared edge cannot slip between both triangles. Hits with
non-positive parameter are rejected. The scalar (numba) and vectorized
(numpy) versions keep identical floating-point expression order so both
code paths return bit-identical parameters.
"""

from __future__ import annotations

import numpy as np

from .._accel import njit

__all__ = ["ray_shear", "intersect_scalar", "intersect_all", "pick_hit_sequential"]


def ray_shear(direction: np.ndarray):
    """Precompute the shear constants (kx, ky, kz, Sx, Sy, Sz) for a ray."""
    d = np.asarray(direction, dtype=np.float64)
    kz = int(np.argmax(np.abs(d)))
    kx = (kz + 1) % 3
    ky = (kx + 1) % 3
    if d[kz] < 0.0:
        kx, ky = ky, kx
    Sx = d[kx] / d[kz]
    Sy = d[ky] / d[kz]
    Sz = 1.0 / d[kz]
    return kx, ky, kz, Sx, Sy, Sz


@njit(cache=True, inline="always")
def _intersect_one(ax, ay, az, bx, by, bz, cx, cy, cz, Sx, Sy, Sz):  # pragma: no cover
    # inputs are triangle vertices relative to the ray origin, in (kx, ky, kz) order
    Axs = ax - Sx * az
    Ays = ay - Sy * az
    Bxs = bx - Sx * bz
    Bys = by - Sy * bz
    Cxs = cx - Sx * cz
    Cys = cy - Sy * cz
    U = Cxs * Bys - Cys * Bxs
    V = Axs * Cys - Ays * Cxs
    W = Bxs * Ays - Bys * Axs
    if (U < 0.0 or V < 0.0 or W < 0.0) and (U > 0.0 or V > 0.0 or W > 0.0):
        return -1.0
    det = U + V + W
    if det == 0.0:
        return -1.0
    T = U * (Sz * az) + V * (Sz * bz) + W * (Sz * cz)
    t = T / det
    if t <= 0.0:
        return -1.0
    return t


@njit(cache=True, inline="always")
def intersect_scalar(verts, tri_v0, tri_v1, tri_v2, tri_idx, ox, oy, oz, kx, ky, kz, Sx, Sy, Sz):  # pragma: no cover
    """Parameter t for one triangle (by packed index), -1.0 on miss."""
    a0 = verts[tri_v0[tri_idx], kx] - ox
    a1 = verts[tri_v0[tri_idx], ky] - oy
    a2 = verts[tri_v0[tri_idx], kz] - oz
    b0 = verts[tri_v1[tri_idx], kx] - ox
    b1 = verts[tri_v1[tri_idx], ky] - oy
    b2 = verts[tri_v1[tri_idx], kz] - oz
    c0 = verts[tri_v2[tri_idx], kx] - ox
    c1 = verts[tri_v2[tri_idx], ky] - oy
    c2 = verts[tri_v2[tri_idx], kz] - oz
    return _intersect_one(a0, a1, a2, b0, b1, b2, c0, c1, c2, Sx, Sy, Sz)


def intersect_all(vertices: np.ndarray, triangles: np.ndarray, origin, direction) -> np.ndarray:
    """Vectorized t for every triangle (-1.0 where the ray misses)."""
    kx, ky, kz, Sx, Sy, Sz = ray_shear(direction)
    origin = np.asarray(origin, dtype=np.float64)
    ox, oy, oz = origin[kx], origin[ky], origin[kz]
    A = vertices[triangles[:, 0]]
    B = vertices[triangles[:, 1]]
    C = vertices[triangles[:, 2]]
    ax, ay, az = A[:, kx] - ox, A[:, ky] - oy, A[:, kz] - oz
    bx, by, bz = B[:, kx] - ox, B[:, ky] - oy, B[:, kz] - oz
    cx, cy, cz = C[:, kx] - ox, C[:, ky] - oy, C[:, kz] - oz
    Axs = ax - Sx * az
    Ays = ay - Sy * az
    Bxs = bx - Sx * bz
    Bys = by - Sy * bz
    Cxs = cx - Sx * cz
    Cys = cy - Sy * cz
    U = Cxs * Bys - Cys * Bxs
    V = Axs * Cys - Ays * Cxs
    W = Bxs * Ays - Bys * Axs
    mixed = ((U < 0.0) | (V < 0.0) | (W < 0.0)) & ((U > 0.0) | (V > 0.0) | (W > 0.0))
    det = U + V + W
    bad = mixed | (det == 0.0)
    T = U * (Sz * az) + V * (Sz * bz) + W * (Sz * cz)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = T / np.where(det == 0.0, 1.0, det)
    t = np.where(bad | (t <= 0.0), -1.0, t)
    return t


def pick_hit_sequential(t_values: np.ndarray, eps: float) -> tuple[float, int]:
    """Scan hits in triangle-index order with the epsilon tie rule.

    Nearest positive parameter wins; parameters within eps of the current
    best count as ties and the lower triangle index is kept. Returns
    (t, index) or (-1.0, -1) when nothing hits.
    """
    best_t = np.inf
    best_tri = -1
    for idx in np.nonzero(t_values > 0.0)[0]:
        t = float(t_values[idx])
        if t < best_t - eps:
            best_t = t
            best_tri = int(idx)
        elif t <= best_t + eps and int(idx) < best_tri:
            best_tri = int(idx)
            if t < best_t:
                best_t = t
    if best_tri < 0:
        return -1.0, -1
    return best_t, best_tri
