"""Full-image OB map generation from a mesh scene.

Every 4-adjacent pixel pair with at least one ray hit is examined: pairs
with exactly one hit mark an inter-object boundary on the hitting pixel
(object against background); pairs with two hits go through the verdict
cascade and mark the occluder-side pixel. No boundary is emitted on the
canvas frame border. The marked raster is thinned before labeling, so the
result is 1-px wide by construction plus thinning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._accel import NUMBA_ENABLED
from ..geometry.bvh import Bvh, build_bvh
from ..geometry.camera import PinholeCamera
from ..geometry.mesh import SceneMesh
from ..geometry.render import GBuffer, render_gbuffer
from ..raster import BinaryMap, has_2x2_block, morph_thin
from .occlusion import (
    LABEL_INTER,
    LABEL_NONE,
    LABEL_SELF,
    _COS_CLAMP,
    _WALK_QUEUE,
    GenConfig,
    _pair_sweep_numba,
    adjacency_walk_connected,
)

__all__ = ["ObMap", "generate_ob", "mark_boundaries"]


@dataclass(frozen=True)
class ObMap:
    """Thin OB mask plus a per-on-pixel label raster (0 none, 1 self, 2 inter)."""

    boundary: BinaryMap
    labels: np.ndarray  # (h, w) uint8

    def __post_init__(self):
        if has_2x2_block(self.boundary):
            raise ValueError("OB boundary must be thin")
        if ((self.labels > 0) != self.boundary).any():
            raise ValueError("labels must be defined exactly on boundary pixels")

    def self_occlusion_mask(self) -> BinaryMap:
        return self.labels == LABEL_SELF

    def inter_object_mask(self) -> BinaryMap:
        return self.labels == LABEL_INTER


def _pair_sweep_python(gb: GBuffer, mesh: SceneMesh, cam: PinholeCamera,
                       cfg: GenConfig) -> np.ndarray:
    """Fallback sweep: vectorized continuity pre-filter, per-pair walk for the rest."""
    h, w = gb.shape
    labels = np.zeros((h, w), dtype=np.uint8)
    origin = cam.center
    interior = np.zeros((h, w), dtype=bool)
    interior[1 : h - 1, 1 : w - 1] = True

    for axis in range(2):
        if axis == 0:  # horizontal pairs (x, y)-(x+1, y)
            a = (slice(None), slice(0, w - 1))
            b = (slice(None), slice(1, w))
            pix_angle = 1.0 / cam.fx
        else:  # vertical pairs (x, y)-(x, y+1)
            a = (slice(0, h - 1), slice(None))
            b = (slice(1, h), slice(None))
            pix_angle = 1.0 / cam.fy
        hit_a, hit_b = gb.hit[a], gb.hit[b]

        # one-hit pairs: mark the hitting pixel
        for sel, side in ((hit_a & ~hit_b, a), (~hit_a & hit_b, b)):
            mark = np.zeros((h, w), dtype=bool)
            mark[side] = sel
            mark &= interior
            labels[mark] = np.maximum(labels[mark], LABEL_INTER)

        both = hit_a & hit_b
        if not both.any():
            continue
        gap = np.linalg.norm(gb.point[a] - gb.point[b], axis=-1)
        near_is_a = gb.ray_t[a] <= gb.ray_t[b]
        t_near = np.where(near_is_a, gb.ray_t[a], gb.ray_t[b])
        p_near = np.where(near_is_a[..., None], gb.point[a], gb.point[b])
        n_near = np.where(near_is_a[..., None], gb.normal[a], gb.normal[b])
        with np.errstate(divide="ignore", invalid="ignore"):
            d_near = (p_near - origin) / np.where(t_near[..., None] == 0, 1.0, t_near[..., None])
        cos_inc = np.abs(np.einsum("...c,...c->...", d_near, n_near))
        cos_inc = np.maximum(cos_inc, _COS_CLAMP)
        footprint = t_near * pix_angle / cos_inc
        candidates = both & (gap > cfg.gap_factor * footprint)
        ys, xs = np.nonzero(candidates)
        for y, x in zip(ys.tolist(), xs.tolist()):
            if axis == 0:
                y2, x2 = y, x + 1
            else:
                y2, x2 = y + 1, x
            g = float(gap[y, x])
            if adjacency_walk_connected(mesh.adjacency, mesh.centroids,
                                        int(gb.triangle[y, x]), int(gb.triangle[y2, x2]),
                                        cfg.adjacency_walk_limit, 2.0 * g):
                continue
            same = gb.instance[y, x] == gb.instance[y2, x2]
            if not same and g <= cfg.contact_tolerance * float(footprint[y, x]):
                continue
            code = LABEL_SELF if same else LABEL_INTER
            if gb.depth[y, x] <= gb.depth[y2, x2]:
                by, bx = y, x
            else:
                by, bx = y2, x2
            if interior[by, bx]:
                labels[by, bx] = max(labels[by, bx], code)
    return labels


def mark_boundaries(gb: GBuffer, mesh: SceneMesh, cam: PinholeCamera,
                    cfg: GenConfig) -> np.ndarray:
    """Raw (un-thinned) label raster from the pairwise sweep."""
    if NUMBA_ENABLED and mesh.n_triangles:
        h, w = gb.shape
        labels = np.zeros((h, w), dtype=np.uint8)
        m = mesh.n_triangles
        origin = cam.center
        _pair_sweep_numba(
            gb.hit, gb.triangle, gb.instance, gb.depth, gb.ray_t,
            np.ascontiguousarray(gb.point), mesh.adjacency, mesh.centroids,
            origin[0], origin[1], origin[2], float(cam.fx), float(cam.fy),
            np.ascontiguousarray(gb.normal[..., 0]),
            np.ascontiguousarray(gb.normal[..., 1]),
            np.ascontiguousarray(gb.normal[..., 2]),
            cfg.gap_factor, cfg.adjacency_walk_limit, cfg.contact_tolerance,
            labels,
            np.zeros(m, dtype=np.int64), np.zeros(m, dtype=np.float64),
            np.zeros(_WALK_QUEUE, dtype=np.int32), np.zeros(_WALK_QUEUE, dtype=np.int32),
        )
        return labels
    return _pair_sweep_python(gb, mesh, cam, cfg)


def generate_ob(mesh: SceneMesh, cam: PinholeCamera, cfg: GenConfig = GenConfig(),
                accel: Bvh | None = None) -> tuple[ObMap, GBuffer]:
    """Render the scene and derive its thin, labeled occlusion-boundary map."""
    if accel is None:
        accel = build_bvh(mesh)
    gb = render_gbuffer(mesh, cam, supersample=cfg.supersample, accel=accel)
    raw = mark_boundaries(gb, mesh, cam, cfg)
    thin = morph_thin(raw > LABEL_NONE)
    labels = np.where(thin, raw, np.uint8(LABEL_NONE)).astype(np.uint8)
    return ObMap(boundary=thin, labels=labels), gb
