"""Per-pixel ray casting into G-buffers (hit, depth, normal, instance, triangle)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bvh import Bvh, build_bvh, cast_ray_brute, cast_rays
from .camera import PinholeCamera
from .mesh import SceneMesh

__all__ = ["Hit", "GBuffer", "cast_ray", "render_gbuffer", "SUPERSAMPLE_JITTERS"]

# supersample=1 samples the pixel center; =2 uses a 2x2 jittered grid and
# keeps the nearest hit as the representative for the pixel
SUPERSAMPLE_JITTERS = {
    1: ((0.5, 0.5),),
    2: ((0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)),
}


@dataclass(frozen=True)
class Hit:
    triangle_index: int
    instance_id: int
    point: np.ndarray  # (3,) world
    depth: float  # camera-frame z (or ray distance when cast standalone)
    normal: np.ndarray  # (3,) unit, facing the ray origin

    def __post_init__(self):
        if self.depth <= 0:
            raise ValueError("hit depth must be positive")
        n = np.linalg.norm(self.normal)
        if abs(n - 1.0) > 1e-6:
            raise ValueError("hit normal must be unit length")


@dataclass
class GBuffer:
    """Per-pixel hit record arrays; ``hit`` gates the validity of the rest."""

    hit: np.ndarray  # (h, w) bool
    triangle: np.ndarray  # (h, w) int32, -1 on miss
    instance: np.ndarray  # (h, w) int32, -1 on miss
    depth: np.ndarray  # (h, w) float64 camera z, 0 on miss
    ray_t: np.ndarray  # (h, w) float64 distance along the unit ray, 0 on miss
    point: np.ndarray  # (h, w, 3) float64 world hit point
    normal: np.ndarray  # (h, w, 3) float64 camera-facing unit normal

    @property
    def shape(self) -> tuple[int, int]:
        return self.hit.shape

    def hit_at(self, x: int, y: int) -> Optional[Hit]:
        if not self.hit[y, x]:
            return None
        return Hit(
            triangle_index=int(self.triangle[y, x]),
            instance_id=int(self.instance[y, x]),
            point=self.point[y, x].copy(),
            depth=float(self.depth[y, x]),
            normal=self.normal[y, x].copy(),
        )


def _face_normals(mesh: SceneMesh) -> np.ndarray:
    a, b, c = (mesh.vertices[mesh.triangles[:, i]] for i in range(3))
    n = np.cross(b - a, c - a)
    norm = np.linalg.norm(n, axis=1, keepdims=True)
    return n / np.where(norm == 0, 1.0, norm)


def cast_ray(mesh: SceneMesh, accel: Bvh, origin, direction) -> Optional[Hit]:
    """Nearest positive hit of one world-space ray, or None.

    ``depth`` is the distance along the (unit) ray; render_gbuffer
    replaces it with camera-frame z for its pixels.
    """
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    t, tri = cast_rays(mesh, accel, origin[None, :], direction[None, :])
    if tri[0] < 0:
        return None
    return _hit_from(mesh, origin, direction, float(t[0]), int(tri[0]))


def cast_ray_bruteforce(mesh: SceneMesh, origin, direction, eps: float) -> Optional[Hit]:
    """All-triangle reference route used by the oracle tests."""
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    t, tri = cast_ray_brute(mesh, origin, direction, eps)
    if tri < 0:
        return None
    return _hit_from(mesh, origin, direction, t, tri)


def _hit_from(mesh: SceneMesh, origin, direction, t: float, tri: int) -> Hit:
    point = origin + t * direction
    normals = _face_normals(mesh)
    n = normals[tri]
    if float(n @ direction) > 0:
        n = -n
    return Hit(
        triangle_index=tri,
        instance_id=int(mesh.instance_ids[tri]),
        point=point,
        depth=t,
        normal=n,
    )


def render_gbuffer(mesh: SceneMesh, cam: PinholeCamera, supersample: int = 1,
                   accel: Optional[Bvh] = None) -> GBuffer:
    if supersample not in SUPERSAMPLE_JITTERS:
        raise ValueError(f"supersample must be one of {sorted(SUPERSAMPLE_JITTERS)}")
    if accel is None:
        accel = build_bvh(mesh)
    w, h = cam.width, cam.height
    ys, xs = np.mgrid[0:h, 0:w]
    origin = cam.center
    Rt = cam.rotation.T

    best_t = np.full((h, w), np.inf)
    best_tri = np.full((h, w), -1, dtype=np.int32)
    best_dir = np.zeros((h, w, 3))
    for jx, jy in SUPERSAMPLE_JITTERS[supersample]:
        u = (xs + jx - cam.cx) / cam.fx
        v = (ys + jy - cam.cy) / cam.fy
        d_cam = np.stack([u, v, np.ones_like(u)], axis=-1)
        d_cam /= np.linalg.norm(d_cam, axis=-1, keepdims=True)
        d_world = d_cam @ Rt.T  # rows transformed by Rt
        dirs = d_world.reshape(-1, 3)
        origins = np.broadcast_to(origin, dirs.shape)
        t, tri = cast_rays(mesh, accel, origins, dirs)
        t = t.reshape(h, w)
        tri = tri.reshape(h, w)
        better = (tri >= 0) & (t < best_t)
        best_t = np.where(better, t, best_t)
        best_tri = np.where(better, tri, best_tri)
        best_dir = np.where(better[..., None], d_world, best_dir)

    hit = best_tri >= 0
    t_map = np.where(hit, best_t, 0.0)
    point = origin + t_map[..., None] * best_dir
    cam_pts = point @ cam.rotation.T + cam.translation
    depth = np.where(hit, cam_pts[..., 2], 0.0)

    normal = np.zeros((h, w, 3))
    if hit.any():
        face_n = _face_normals(mesh)
        n = face_n[best_tri.clip(min=0)]
        flip = np.einsum("hwc,hwc->hw", n, best_dir) > 0
        n = np.where(flip[..., None], -n, n)
        normal = np.where(hit[..., None], n, 0.0)

    instance = np.where(hit, mesh.instance_ids[best_tri.clip(min=0)] if mesh.n_triangles else -1, -1)
    return GBuffer(
        hit=hit,
        triangle=best_tri,
        instance=instance.astype(np.int32),
        depth=depth,
        ray_t=t_map,
        point=point,
        normal=normal,
    )
