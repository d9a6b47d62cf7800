"""Per-pixel-pair occlusion verdicts.

Two adjacent pixel rays landing on 3D points decide whether the pair
straddles an occlusion event. The cascade, judged against the expected
3D spacing of the two rays on the nearer surface (the footprint):

  1. gap <= gap_factor * footprint                  -> continuous surface
  2. hit triangles joined by a short edge-adjacency
     walk (bounded triangle count, centroid path
     length <= 2 * gap)                             -> continuous (steep surface)
  3. different instances and gap within
     contact_tolerance * footprint                  -> contact (no boundary)
  4. otherwise                                      -> occlusion: inter-object if
                                                       instances differ, else
                                                       self-occlusion

The occluder is the side with smaller camera depth. The footprint is
nearer_ray_distance * pixel_angle / max(cos incidence, 0.2); the clamp
bounds footprint blow-up at grazing silhouettes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._accel import njit
from ..geometry.mesh import SceneMesh
from ..geometry.render import Hit

__all__ = ["GenConfig", "OcclusionVerdict", "occlusion_test", "adjacency_walk_connected"]

# footprint incidence clamp and walk queue bound
_COS_CLAMP = 0.2
_WALK_QUEUE = 4096

LABEL_NONE = 0
LABEL_SELF = 1
LABEL_INTER = 2


@dataclass(frozen=True)
class GenConfig:
    """Occlusion-test tuning constants (the defaults are the operating point)."""

    gap_factor: float = 3.0
    adjacency_walk_limit: int = 8  # max triangles visited per rescue walk
    contact_tolerance: float = 0.5
    supersample: int = 1

    def __post_init__(self):
        if not self.gap_factor > 1.0:
            raise ValueError("gap_factor must exceed 1")
        if self.adjacency_walk_limit < 0 or self.contact_tolerance < 0:
            raise ValueError("limits must be >= 0")
        if self.supersample not in (1, 2):
            raise ValueError("supersample must be 1 or 2")


@dataclass(frozen=True)
class OcclusionVerdict:
    kind: str  # continuous | inter_object_occlusion | self_occlusion | contact
    occluder_side: str  # first_pixel | second_pixel | none

    def __post_init__(self):
        passive = self.kind in ("continuous", "contact")
        if passive != (self.occluder_side == "none"):
            raise ValueError("occluder_side must be none exactly for continuous/contact")

    @property
    def is_boundary(self) -> bool:
        return self.kind in ("inter_object_occlusion", "self_occlusion")


def adjacency_walk_connected(adjacency: np.ndarray, centroids: np.ndarray,
                             tri_a: int, tri_b: int, max_triangles: int,
                             max_length: float) -> bool:
    """Bounded Dijkstra over the triangle adjacency graph.

    True when a walk of at most ``max_triangles`` triangles joins a and b
    with cumulative centroid path length <= max_length.
    """
    if max_triangles < 1:
        return False
    if tri_a == tri_b:
        return True
    best = {tri_a: 0.0}
    frontier = {tri_a: 0.0}
    for _ in range(max_triangles - 1):
        nxt: dict[int, float] = {}
        for tri, dist in frontier.items():
            for nb in adjacency[tri]:
                nb = int(nb)
                if nb < 0:
                    continue
                nd = dist + float(np.linalg.norm(centroids[nb] - centroids[tri]))
                if nd > max_length:
                    continue
                if nd < best.get(nb, np.inf):
                    best[nb] = nd
                    nxt[nb] = nd
        if tri_b in best:
            return True
        if not nxt:
            return False
        frontier = nxt
    return tri_b in best


def occlusion_test(mesh: SceneMesh, hit_p: Hit, hit_q: Hit, footprint: float,
                   cfg: GenConfig) -> OcclusionVerdict:
    """Classify one pixel pair; ``footprint`` must be positive."""
    if footprint <= 0:
        raise ValueError("footprint must be positive")
    gap = float(np.linalg.norm(hit_p.point - hit_q.point))
    if gap <= cfg.gap_factor * footprint:
        return OcclusionVerdict("continuous", "none")
    if adjacency_walk_connected(mesh.adjacency, mesh.centroids,
                                hit_p.triangle_index, hit_q.triangle_index,
                                cfg.adjacency_walk_limit, 2.0 * gap):
        return OcclusionVerdict("continuous", "none")
    same_instance = hit_p.instance_id == hit_q.instance_id
    if not same_instance and gap <= cfg.contact_tolerance * footprint:
        return OcclusionVerdict("contact", "none")
    kind = "self_occlusion" if same_instance else "inter_object_occlusion"
    side = "first_pixel" if hit_p.depth <= hit_q.depth else "second_pixel"
    return OcclusionVerdict(kind, side)


@njit(cache=True, inline="always")
def _walk_connected_numba(adjacency, centroids, tri_a, tri_b, max_triangles,
                          max_length, stamp, best_dist, queue_a, queue_b, epoch):  # pragma: no cover
    if max_triangles < 1:
        return False
    if tri_a == tri_b:
        return True
    stamp[tri_a] = epoch
    best_dist[tri_a] = 0.0
    queue_a[0] = tri_a
    n_cur = 1
    for _level in range(max_triangles - 1):
        n_nxt = 0
        for qi in range(n_cur):
            tri = queue_a[qi]
            dist = best_dist[tri]
            for k in range(3):
                nb = adjacency[tri, k]
                if nb < 0:
                    continue
                dx = centroids[nb, 0] - centroids[tri, 0]
                dy = centroids[nb, 1] - centroids[tri, 1]
                dz = centroids[nb, 2] - centroids[tri, 2]
                nd = dist + np.sqrt(dx * dx + dy * dy + dz * dz)
                if nd > max_length:
                    continue
                if stamp[nb] == epoch and best_dist[nb] <= nd:
                    continue
                stamp[nb] = epoch
                best_dist[nb] = nd
                if n_nxt < queue_b.shape[0]:
                    queue_b[n_nxt] = nb
                    n_nxt += 1
        if stamp[tri_b] == epoch:
            return True
        if n_nxt == 0:
            return False
        for qi in range(n_nxt):
            queue_a[qi] = queue_b[qi]
        n_cur = n_nxt
    return stamp[tri_b] == epoch


@njit(cache=True)
def _pair_sweep_numba(hit, tri, inst, depth, ray_t, points, adjacency, centroids,
                      ox, oy, oz, fx, fy, nx_arr, ny_arr, nz_arr,
                      gap_factor, walk_limit, contact_tol, labels,
                      stamp, best_dist, queue_a, queue_b):  # pragma: no cover
    h, w = hit.shape
    epoch = 0
    for y in range(h):
        for x in range(w):
            for direction in range(2):
                if direction == 0:
                    x2 = x + 1
                    y2 = y
                    pix_angle = 1.0 / fx
                else:
                    x2 = x
                    y2 = y + 1
                    pix_angle = 1.0 / fy
                if x2 >= w or y2 >= h:
                    continue
                h1 = hit[y, x]
                h2 = hit[y2, x2]
                if not h1 and not h2:
                    continue
                if h1 != h2:
                    # object against background: boundary on the hitting side
                    if h1:
                        bx, by = x, y
                    else:
                        bx, by = x2, y2
                    if 0 < bx < w - 1 and 0 < by < h - 1:
                        if labels[by, bx] < LABEL_INTER:
                            labels[by, bx] = LABEL_INTER
                    continue
                # both hit
                dxp = points[y2, x2, 0] - points[y, x, 0]
                dyp = points[y2, x2, 1] - points[y, x, 1]
                dzp = points[y2, x2, 2] - points[y, x, 2]
                gap = np.sqrt(dxp * dxp + dyp * dyp + dzp * dzp)
                if ray_t[y, x] <= ray_t[y2, x2]:
                    ny_, nx_ = y, x
                else:
                    ny_, nx_ = y2, x2
                t_near = ray_t[ny_, nx_]
                dirx = (points[ny_, nx_, 0] - ox) / t_near
                diry = (points[ny_, nx_, 1] - oy) / t_near
                dirz = (points[ny_, nx_, 2] - oz) / t_near
                cos_inc = abs(dirx * nx_arr[ny_, nx_] + diry * ny_arr[ny_, nx_]
                              + dirz * nz_arr[ny_, nx_])
                if cos_inc < _COS_CLAMP:
                    cos_inc = _COS_CLAMP
                footprint = t_near * pix_angle / cos_inc
                if gap <= gap_factor * footprint:
                    continue
                epoch += 1
                if _walk_connected_numba(adjacency, centroids, tri[y, x], tri[y2, x2],
                                         walk_limit, 2.0 * gap, stamp, best_dist,
                                         queue_a, queue_b, epoch):
                    continue
                same = inst[y, x] == inst[y2, x2]
                if not same and gap <= contact_tol * footprint:
                    continue
                code = LABEL_SELF if same else LABEL_INTER
                if depth[y, x] <= depth[y2, x2]:
                    by, bx = y, x
                else:
                    by, bx = y2, x2
                if 0 < bx < w - 1 and 0 < by < h - 1:
                    if labels[by, bx] < code:
                        labels[by, bx] = code
    return epoch
