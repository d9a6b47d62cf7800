"""Bounding-volume hierarchy over triangles (median split, flat arrays).

The BVH is a performance structure only: casting through it must agree
with brute-force intersection over all triangles, which the test suite
checks against random scenes. Traversal lives in a numba kernel; with
numba disabled, casting falls back to vectorized brute force.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._accel import NUMBA_ENABLED, njit, prange
from .intersect import intersect_all, intersect_scalar, pick_hit_sequential
from .mesh import SceneMesh

__all__ = ["Bvh", "build_bvh", "cast_rays", "cast_ray_brute"]

_LEAF_SIZE = 4
_STACK_DEPTH = 96


@dataclass(frozen=True)
class Bvh:
    bounds_min: np.ndarray  # (nodes, 3)
    bounds_max: np.ndarray  # (nodes, 3)
    left: np.ndarray  # (nodes,) int32, -1 on leaves
    right: np.ndarray  # (nodes,) int32
    start: np.ndarray  # (nodes,) int32 into perm
    count: np.ndarray  # (nodes,) int32, 0 on inner nodes
    perm: np.ndarray  # (m,) int32 triangle order
    eps: float  # tie window: 1e-9 x scene diameter


def build_bvh(mesh: SceneMesh) -> Bvh:
    m = mesh.n_triangles
    eps = 1e-9 * max(mesh.diameter(), 1e-30)
    if m == 0:
        z = np.zeros((1, 3))
        return Bvh(z, z, np.array([-1], np.int32), np.array([-1], np.int32),
                   np.array([0], np.int32), np.array([0], np.int32),
                   np.zeros(0, np.int32), eps)
    tri_pts = mesh.vertices[mesh.triangles]  # (m, 3, 3)
    tri_min = tri_pts.min(axis=1)
    tri_max = tri_pts.max(axis=1)
    cents = mesh.centroids

    bmin, bmax, left, right, start, count = [], [], [], [], [], []

    def add_node():
        bmin.append(None)
        bmax.append(None)
        left.append(-1)
        right.append(-1)
        start.append(0)
        count.append(0)
        return len(bmin) - 1

    perm = np.arange(m, dtype=np.int32)

    def build(idx: np.ndarray) -> int:
        node = add_node()
        bmin[node] = tri_min[idx].min(axis=0)
        bmax[node] = tri_max[idx].max(axis=0)
        if len(idx) <= _LEAF_SIZE:
            start[node] = len(ordered)
            count[node] = len(idx)
            ordered.extend(idx.tolist())
            return node
        c = cents[idx]
        axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
        order = idx[np.argsort(c[:, axis], kind="stable")]
        half = len(order) // 2
        left[node] = build(order[:half])
        right[node] = build(order[half:])
        return node

    ordered: list[int] = []
    import sys

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 10_000))
    try:
        build(perm)
    finally:
        sys.setrecursionlimit(old_limit)
    return Bvh(
        np.asarray(bmin, dtype=np.float64),
        np.asarray(bmax, dtype=np.float64),
        np.asarray(left, dtype=np.int32),
        np.asarray(right, dtype=np.int32),
        np.asarray(start, dtype=np.int32),
        np.asarray(count, dtype=np.int32),
        np.asarray(ordered, dtype=np.int32),
        eps,
    )


@njit(cache=True, inline="always")
def _aabb_enter(bmin, bmax, node, ox, oy, oz, dx, dy, dz, t_limit):  # pragma: no cover
    """Entry parameter of the ray into the node box; inf when missed."""
    tmin = 0.0
    tmax = t_limit
    for axis in range(3):
        if axis == 0:
            o, d = ox, dx
        elif axis == 1:
            o, d = oy, dy
        else:
            o, d = oz, dz
        lo = bmin[node, axis]
        hi = bmax[node, axis]
        if d != 0.0:
            inv = 1.0 / d
            t0 = (lo - o) * inv
            t1 = (hi - o) * inv
            if t0 > t1:
                t0, t1 = t1, t0
            if t0 > tmin:
                tmin = t0
            if t1 < tmax:
                tmax = t1
            if tmin > tmax:
                return np.inf
        else:
            if o < lo or o > hi:
                return np.inf
    return tmin


@njit(cache=True)
def _cast_one(bounds_min, bounds_max, left, right, start, count, perm,
              verts, v0, v1, v2, ox, oy, oz, dwx, dwy, dwz, eps):  # pragma: no cover
    # shear setup; axis choice mirrors ray_shear (first max wins ties)
    adx = abs(dwx)
    ady = abs(dwy)
    adz = abs(dwz)
    if adx >= ady and adx >= adz:
        kz = 0
    elif ady >= adz:
        kz = 1
    else:
        kz = 2
    kx = (kz + 1) % 3
    ky = (kx + 1) % 3
    dk = dwx if kz == 0 else (dwy if kz == 1 else dwz)
    if dk < 0.0:
        kx, ky = ky, kx
    Sx = (dwx if kx == 0 else (dwy if kx == 1 else dwz)) / dk
    Sy = (dwx if ky == 0 else (dwy if ky == 1 else dwz)) / dk
    Sz = 1.0 / dk
    osx = ox if kx == 0 else (oy if kx == 1 else oz)
    osy = ox if ky == 0 else (oy if ky == 1 else oz)
    osz = ox if kz == 0 else (oy if kz == 1 else oz)

    stack = np.empty(_STACK_DEPTH, dtype=np.int32)
    stack[0] = 0
    sp = 1
    best_t = np.inf
    best_tri = -1
    while sp > 0:
        sp -= 1
        node = stack[sp]
        limit = best_t + eps
        if _aabb_enter(bounds_min, bounds_max, node, ox, oy, oz, dwx, dwy, dwz, limit) == np.inf:
            continue
        if left[node] < 0:
            for k in range(count[node]):
                tri = perm[start[node] + k]
                t = intersect_scalar(verts, v0, v1, v2, tri, osx, osy, osz, kx, ky, kz, Sx, Sy, Sz)
                if t <= 0.0:
                    continue
                if t < best_t - eps:
                    best_t = t
                    best_tri = tri
                elif t <= best_t + eps and tri < best_tri:
                    best_tri = tri
                    if t < best_t:
                        best_t = t
        else:
            l = left[node]
            r = right[node]
            tl = _aabb_enter(bounds_min, bounds_max, l, ox, oy, oz, dwx, dwy, dwz, limit)
            tr = _aabb_enter(bounds_min, bounds_max, r, ox, oy, oz, dwx, dwy, dwz, limit)
            # push the farther child first so the nearer is explored first
            if tl <= tr:
                if tr != np.inf:
                    stack[sp] = r
                    sp += 1
                if tl != np.inf:
                    stack[sp] = l
                    sp += 1
            else:
                if tl != np.inf:
                    stack[sp] = l
                    sp += 1
                if tr != np.inf:
                    stack[sp] = r
                    sp += 1
    if best_tri < 0:
        return -1.0, -1
    return best_t, best_tri


@njit(cache=True, parallel=True)
def _cast_batch_numba(bounds_min, bounds_max, left, right, start, count, perm,
                      verts, v0, v1, v2, origins, dirs, eps, out_t, out_tri):  # pragma: no cover
    n = origins.shape[0]
    for i in prange(n):
        t, tri = _cast_one(bounds_min, bounds_max, left, right, start, count, perm,
                           verts, v0, v1, v2,
                           origins[i, 0], origins[i, 1], origins[i, 2],
                           dirs[i, 0], dirs[i, 1], dirs[i, 2], eps)
        out_t[i] = t
        out_tri[i] = tri


def cast_ray_brute(mesh: SceneMesh, origin, direction, eps: float) -> tuple[float, int]:
    """Brute-force nearest hit over every triangle (the oracle route)."""
    if mesh.n_triangles == 0:
        return -1.0, -1
    t = intersect_all(mesh.vertices, mesh.triangles, origin, direction)
    return pick_hit_sequential(t, eps)


def cast_rays(mesh: SceneMesh, bvh: Bvh, origins: np.ndarray, dirs: np.ndarray):
    """Nearest hits for a batch of rays: (t, triangle_index) arrays.

    t = -1 and triangle = -1 where nothing is hit.
    """
    origins = np.ascontiguousarray(origins, dtype=np.float64).reshape(-1, 3)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64).reshape(-1, 3)
    n = origins.shape[0]
    out_t = np.full(n, -1.0)
    out_tri = np.full(n, -1, dtype=np.int32)
    if mesh.n_triangles == 0:
        return out_t, out_tri
    if NUMBA_ENABLED:
        tris = mesh.triangles
        _cast_batch_numba(
            bvh.bounds_min, bvh.bounds_max, bvh.left, bvh.right, bvh.start, bvh.count,
            bvh.perm, mesh.vertices,
            np.ascontiguousarray(tris[:, 0]), np.ascontiguousarray(tris[:, 1]),
            np.ascontiguousarray(tris[:, 2]),
            origins, dirs, bvh.eps, out_t, out_tri,
        )
    else:
        for i in range(n):
            t, tri = cast_ray_brute(mesh, origins[i], dirs[i], bvh.eps)
            out_t[i] = t
            out_tri[i] = tri
    return out_t, out_tri
