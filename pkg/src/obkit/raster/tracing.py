"""Boundary-segment tracing on thin binary maps.

On-pixels are partitioned into ordered polylines: pixels with at most two
on-neighbors form chains and cycles; junction pixels (three or more
on-neighbors) terminate chains and are attached to exactly one adjacent
segment end afterwards, preferring ends that are not themselves junction
pixels so segments do not snake through a junction cluster.
"""

from __future__ import annotations

import numpy as np

from ..errors import NotThinError
from .types import BinaryMap, BoundarySegment, has_2x2_block

__all__ = ["trace_segments", "neighbor_counts", "segments_to_map"]

# fixed neighbor scan order (row-major) keeps tracing deterministic
_OFFSETS = ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))


def neighbor_counts(b: BinaryMap) -> np.ndarray:
    """Number of on-neighbors (8-adjacency) for every pixel."""
    src = np.pad(b.astype(np.uint8), 1)
    h, w = b.shape
    cnt = np.zeros((h, w), dtype=np.uint8)
    for dy in range(3):
        for dx in range(3):
            if dy == 1 and dx == 1:
                continue
            cnt += src[dy : dy + h, dx : dx + w]
    return cnt


def trace_segments(b: BinaryMap) -> list[BoundarySegment]:
    """Split the on-set into maximal simple paths, cut at junction pixels."""
    if has_2x2_block(b):
        raise NotThinError("map contains a 2x2 all-ones block; thin it first")
    h, w = b.shape
    deg = neighbor_counts(b)
    junction = b & (deg >= 3)
    chain = b & ~junction
    visited = np.zeros((h, w), dtype=bool)

    def on_neighbors(x, y, mask):
        out = []
        for dx, dy in _OFFSETS:
            nx, ny = x + dx, y + dy
            if 0 <= nx < w and 0 <= ny < h and mask[ny, nx]:
                out.append((nx, ny))
        return out

    def walk(x, y):
        path = [(x, y)]
        visited[y, x] = True
        while True:
            nxt = None
            for nx, ny in on_neighbors(*path[-1], chain):
                if not visited[ny, nx]:
                    nxt = (nx, ny)
                    break
            if nxt is None:
                return path
            visited[nxt[1], nxt[0]] = True
            path.append(nxt)

    paths: list[list[tuple[int, int]]] = []

    # open chains start where a chain pixel has at most one chain neighbor
    ys, xs = np.nonzero(chain)
    coords = list(zip(xs.tolist(), ys.tolist()))
    for x, y in coords:
        if visited[y, x]:
            continue
        if len(on_neighbors(x, y, chain)) <= 1:
            paths.append(walk(x, y))
    # leftovers are pure cycles
    for x, y in coords:
        if not visited[y, x]:
            paths.append(walk(x, y))

    # attach junction pixels to adjacent segment ends
    jys, jxs = np.nonzero(junction)
    for x, y in zip(jxs.tolist(), jys.tolist()):
        if visited[y, x]:
            continue
        target = None
        for prefer_fresh in (True, False):
            for idx, path in enumerate(paths):
                for end in (-1, 0):
                    ex, ey = path[end]
                    if max(abs(ex - x), abs(ey - y)) != 1:
                        continue
                    if prefer_fresh and junction[ey, ex]:
                        continue
                    target = (idx, end)
                    break
                if target is not None:
                    break
            if target is not None:
                break
        if target:
            idx, end = target
            if end == -1:
                paths[idx].append((x, y))
            else:
                paths[idx].insert(0, (x, y))
            visited[y, x] = True
        else:
            # junction cluster with no adjacent chain: walk it as its own path
            paths.append(walk_junctions(x, y, junction, visited, w, h))

    return [BoundarySegment(np.array(p, dtype=np.int32)) for p in paths]


def walk_junctions(x, y, junction, visited, w, h):
    path = [(x, y)]
    visited[y, x] = True
    while True:
        nxt = None
        cx, cy = path[-1]
        for dx, dy in _OFFSETS:
            nx, ny = cx + dx, cy + dy
            if 0 <= nx < w and 0 <= ny < h and junction[ny, nx] and not visited[ny, nx]:
                nxt = (nx, ny)
                break
        if nxt is None:
            return path
        visited[nxt[1], nxt[0]] = True
        path.append(nxt)


def segments_to_map(segments, shape) -> BinaryMap:
    """Rasterize segment pixels back onto an empty canvas."""
    out = np.zeros(shape, dtype=bool)
    h, w = shape
    for seg in segments:
        pts = seg.points if isinstance(seg, BoundarySegment) else np.asarray(seg)
        ok = (pts[:, 0] >= 0) & (pts[:, 0] < w) & (pts[:, 1] >= 0) & (pts[:, 1] < h)
        out[pts[ok, 1], pts[ok, 0]] = True
    return out
