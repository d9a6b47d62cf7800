"""Tolerance-based one-to-one boundary correspondence.

The matcher works on the implicit bipartite graph between pred and gt
on-pixels with edges wherever the Euclidean distance is <= d_max. It
runs in two phases with identical semantics on the numba and numpy
paths:

  1. distance-bucketed greedy: candidate offsets are visited in order of
     increasing distance; at a fixed offset every unmatched pred pixel
     pairs with the unmatched gt pixel at that offset (injective per
     offset, hence conflict-free), which settles the bulk of the
     correspondence with spatially tight pairs;
  2. augmenting-path completion (Kuhn) for the leftovers, which makes
     the final match count maximum-cardinality, so it meets the optimal
     oracle exactly; the acceptance suite checks this against an
     independent max-cardinality solver.

``method="exact"`` instead builds the explicit graph and solves it with
scipy's bipartite matcher; slower, kept for cross-checking.
"""

from __future__ import annotations

import numpy as np

from .._accel import NUMBA_ENABLED, njit
from ..errors import DimensionMismatchError, NotThinError
from ..raster import BinaryMap, has_2x2_block

__all__ = ["match_boundaries", "match_offsets"]


def match_offsets(d_max: float) -> np.ndarray:
    """(n, 2) integer offsets with |off| <= d_max, sorted by distance.

    Ties break by (dy, dx) so every matcher path visits buckets alike.
    """
    r = int(np.floor(d_max))
    rng = np.arange(-r, r + 1)
    dx, dy = np.meshgrid(rng, rng)
    d2 = dx * dx + dy * dy
    keep = d2 <= d_max * d_max
    offs = np.stack([dx[keep], dy[keep], d2[keep]], axis=1)
    order = np.lexsort((offs[:, 0], offs[:, 1], offs[:, 2]))
    return offs[order, :2].astype(np.int64)


@njit(cache=True)
def _match_numba(pred_xs, pred_ys, gt_grid, pred_grid, offs, h, w):  # pragma: no cover
    n_pred = pred_xs.shape[0]
    n_offs = offs.shape[0]
    match_pred = np.full(n_pred, -1, dtype=np.int64)
    # gt match state lives on the grid: -1 free, otherwise pred index
    owner = np.full((h, w), -1, dtype=np.int64)

    # phase 1: bucket greedy in distance order
    for k in range(n_offs):
        dx = offs[k, 0]
        dy = offs[k, 1]
        for i in range(n_pred):
            if match_pred[i] >= 0:
                continue
            gx = pred_xs[i] + dx
            gy = pred_ys[i] + dy
            if gx < 0 or gx >= w or gy < 0 or gy >= h:
                continue
            if gt_grid[gy, gx] >= 0 and owner[gy, gx] < 0:
                owner[gy, gx] = i
                match_pred[i] = gy * w + gx

    # phase 2: augmenting paths for the leftovers
    visited = np.full((h, w), -1, dtype=np.int64)
    f_pred = np.empty(n_pred + 1, dtype=np.int64)
    f_off = np.empty(n_pred + 1, dtype=np.int64)
    f_gt = np.empty(n_pred + 1, dtype=np.int64)
    stamp = 0
    for s in range(n_pred):
        if match_pred[s] >= 0:
            continue
        stamp += 1
        depth = 0
        f_pred[0] = s
        f_off[0] = 0
        found = False
        while depth >= 0:
            p = f_pred[depth]
            advanced = False
            while f_off[depth] < n_offs:
                k = f_off[depth]
                f_off[depth] += 1
                gx = pred_xs[p] + offs[k, 0]
                gy = pred_ys[p] + offs[k, 1]
                if gx < 0 or gx >= w or gy < 0 or gy >= h:
                    continue
                if gt_grid[gy, gx] < 0 or visited[gy, gx] == stamp:
                    continue
                visited[gy, gx] = stamp
                f_gt[depth] = gy * w + gx
                own = owner[gy, gx]
                if own < 0:
                    for d in range(depth, -1, -1):
                        g = f_gt[d]
                        pp = f_pred[d]
                        owner[g // w, g % w] = pp
                        match_pred[pp] = g
                    found = True
                else:
                    depth += 1
                    f_pred[depth] = own
                    f_off[depth] = 0
                advanced = True
                break
            if found:
                break
            if not advanced:
                depth -= 1
    tp = 0
    for i in range(n_pred):
        if match_pred[i] >= 0:
            tp += 1
    return tp


def _match_python(pred: np.ndarray, gt: np.ndarray, offs: np.ndarray) -> int:
    h, w = pred.shape
    py, px = np.nonzero(pred)
    n_pred = len(px)
    gt_grid = np.where(gt, 0, -1)
    match_pred = np.full(n_pred, -1, dtype=np.int64)
    owner = np.full((h, w), -1, dtype=np.int64)
    pred_id = np.full((h, w), -1, dtype=np.int64)
    pred_id[py, px] = np.arange(n_pred)

    # phase 1: vectorized bucket greedy
    unmatched = np.ones((h, w), dtype=bool)
    unmatched[~pred] = False
    gt_free = gt.copy()
    for dx, dy in offs.tolist():
        ys = slice(max(0, -dy), min(h, h - dy))
        gys = slice(max(0, dy), min(h, h + dy))
        xs = slice(max(0, -dx), min(w, w - dx))
        gxs = slice(max(0, dx), min(w, w + dx))
        cand = unmatched[ys, xs] & gt_free[gys, gxs]
        if not cand.any():
            continue
        ids = pred_id[ys, xs][cand]
        gy_idx, gx_idx = np.nonzero(cand)
        gy_idx = gy_idx + gys.start
        gx_idx = gx_idx + gxs.start
        owner[gy_idx, gx_idx] = ids
        match_pred[ids] = gy_idx * w + gx_idx
        unmatched[ys, xs] &= ~cand
        gt_free[gys, gxs] &= ~cand

    # phase 2: iterative Kuhn augmentation, mirroring the numba kernel
    visited = np.full((h, w), -1, dtype=np.int64)
    offs_list = offs.tolist()
    n_offs = len(offs_list)
    stamp = 0
    for s in range(n_pred):
        if match_pred[s] >= 0:
            continue
        stamp += 1
        frames = [[s, 0, -1]]  # pred, next offset, chosen gt
        found = False
        while frames:
            frame = frames[-1]
            p = frame[0]
            advanced = False
            while frame[1] < n_offs:
                dx, dy = offs_list[frame[1]]
                frame[1] += 1
                gx = int(px[p]) + dx
                gy = int(py[p]) + dy
                if not (0 <= gx < w and 0 <= gy < h):
                    continue
                if gt_grid[gy, gx] < 0 or visited[gy, gx] == stamp:
                    continue
                visited[gy, gx] = stamp
                frame[2] = gy * w + gx
                own = owner[gy, gx]
                if own < 0:
                    for fp, _fo, fg in reversed(frames):
                        owner[fg // w, fg % w] = fp
                        match_pred[fp] = fg
                    found = True
                else:
                    frames.append([int(own), 0, -1])
                advanced = True
                break
            if found:
                break
            if not advanced:
                frames.pop()
    return int((match_pred >= 0).sum())


def _exact_count(pred: np.ndarray, gt: np.ndarray, d_max: float) -> int:
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    py, px = np.nonzero(pred)
    gy, gx = np.nonzero(gt)
    if len(py) == 0 or len(gy) == 0:
        return 0
    gt_index = {}
    for j, (x, y) in enumerate(zip(gx.tolist(), gy.tolist())):
        gt_index[(x, y)] = j
    rows, cols = [], []
    offs = match_offsets(d_max)
    for i, (x, y) in enumerate(zip(px.tolist(), py.tolist())):
        for dx, dy in offs.tolist():
            j = gt_index.get((x + dx, y + dy))
            if j is not None:
                rows.append(i)
                cols.append(j)
    if not rows:
        return 0
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)),
                       shape=(len(py), len(gy))).tocsr()
    matching = maximum_bipartite_matching(graph, perm_type="column")
    return int((matching >= 0).sum())


def match_boundaries(pred: BinaryMap, gt: BinaryMap, d_max: float,
                     method: str = "greedy") -> tuple[int, int, int]:
    """(tp, fp_count, fn_count) under one-to-one matching within d_max."""
    if pred.shape != gt.shape:
        raise DimensionMismatchError(f"pred {pred.shape} vs gt {gt.shape}")
    if has_2x2_block(pred) or has_2x2_block(gt):
        raise NotThinError("matching requires thin maps")
    if d_max < 0:
        raise ValueError("d_max must be >= 0")
    n_pred = int(pred.sum())
    n_gt = int(gt.sum())
    if n_pred == 0 or n_gt == 0:
        return 0, n_pred, n_gt
    if method == "exact":
        tp = _exact_count(pred, gt, d_max)
    elif method == "greedy":
        offs = match_offsets(d_max)
        h, w = pred.shape
        if NUMBA_ENABLED:
            py, px = np.nonzero(pred)
            gt_grid = np.where(gt, np.int64(0), np.int64(-1))
            pred_id = np.full((h, w), -1, dtype=np.int64)
            pred_id[py, px] = np.arange(len(px))
            tp = int(_match_numba(px.astype(np.int64), py.astype(np.int64),
                                  gt_grid, pred_id, offs, h, w))
        else:
            tp = _match_python(pred, gt, offs)
    else:
        raise ValueError(f"unknown matching method {method!r}")
    return tp, n_pred - tp, n_gt - tp
