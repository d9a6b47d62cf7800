"""Morphological thinning of binary maps.

Thin means: no 2x2 all-ones block. Maps that are already thin pass
through unchanged (a ring corner or an L elbow is not touched), which
keeps generated boundaries pixel-accurate.

Thick regions are reduced by sequential directional boundary peeling:
each iteration runs four sub-passes (north, south, west, east borders)
deleting pixels that (a) participate in some 2x2 all-ones block, (b) are
not endpoints or isolated pixels, and (c) whose removal keeps the
8-connectivity of their neighborhood intact (Yokoi connectivity number
1). Deletion is in-place in row-major order, so results are
deterministic and the numba and python paths agree exactly.

Peeling alone can leave a locked 2x2 block when every block pixel is a
junction of diagonal branches; a cleanup pass then breaks each remaining
block, preferring a topologically safe pixel and force-deleting one
otherwise (the only case where a connectivity break is accepted, since
downstream tracing requires thin maps). Peeling and cleanup repeat to a
global fixpoint, which makes the operation idempotent.
"""

from __future__ import annotations

import numpy as np

from .._accel import NUMBA_ENABLED, njit
from .types import BinaryMap

__all__ = ["morph_thin"]

# directional sub-pass order: N, S, W, E offsets of the 4-neighbor that must be off
_DIRECTIONS = ((0, -1), (0, 1), (-1, 0), (1, 0))


def _ring(img: np.ndarray, x: int, y: int) -> tuple[int, ...]:
    """Neighborhood values in Yokoi order E, NE, N, NW, W, SW, S, SE (0 outside)."""
    h, w = img.shape

    def at(px, py):
        if 0 <= px < w and 0 <= py < h:
            return int(img[py, px])
        return 0

    return (
        at(x + 1, y),
        at(x + 1, y - 1),
        at(x, y - 1),
        at(x - 1, y - 1),
        at(x - 1, y),
        at(x - 1, y + 1),
        at(x, y + 1),
        at(x + 1, y + 1),
    )


def _in_block_py(img: np.ndarray, x: int, y: int) -> bool:
    h, w = img.shape
    for bx, by in ((x - 1, y - 1), (x, y - 1), (x - 1, y), (x, y)):
        if 0 <= bx < w - 1 and 0 <= by < h - 1:
            if img[by, bx] and img[by, bx + 1] and img[by + 1, bx] and img[by + 1, bx + 1]:
                return True
    return False


def _deletable_py(img: np.ndarray, x: int, y: int) -> bool:
    ring = _ring(img, x, y)
    cnt = sum(ring)
    if cnt < 2:  # endpoint or isolated: preserve
        return False
    c8 = 0
    for k in (0, 2, 4, 6):
        a = 1 - ring[k]
        b = 1 - ring[(k + 1) % 8]
        c = 1 - ring[(k + 2) % 8]
        c8 += a - a * b * c
    return c8 == 1


@njit(cache=True, inline="always")
def _in_block_numba(img, x, y):  # pragma: no cover - compiled
    h, w = img.shape
    for k in range(4):
        bx = x - 1 + (k & 1)
        by = y - 1 + (k >> 1)
        if 0 <= bx < w - 1 and 0 <= by < h - 1:
            if img[by, bx] != 0 and img[by, bx + 1] != 0 and img[by + 1, bx] != 0 and img[by + 1, bx + 1] != 0:
                return True
    return False


@njit(cache=True, inline="always")
def _deletable_numba(img, x, y):  # pragma: no cover - compiled
    h, w = img.shape
    ring = np.zeros(8, dtype=np.int64)
    offs_x = (1, 1, 0, -1, -1, -1, 0, 1)
    offs_y = (0, -1, -1, -1, 0, 1, 1, 1)
    cnt = 0
    for i in range(8):
        px = x + offs_x[i]
        py = y + offs_y[i]
        if 0 <= px < w and 0 <= py < h and img[py, px] != 0:
            ring[i] = 1
            cnt += 1
    if cnt < 2:
        return False
    c8 = 0
    for k in range(0, 8, 2):
        a = 1 - ring[k]
        b = 1 - ring[(k + 1) % 8]
        c = 1 - ring[(k + 2) % 8]
        c8 += a - a * b * c
    return c8 == 1


@njit(cache=True)
def _peel_pass_numba(img, dx, dy):  # pragma: no cover - compiled
    h, w = img.shape
    deleted = 0
    for y in range(h):
        for x in range(w):
            if img[y, x] == 0:
                continue
            nx = x + dx
            ny = y + dy
            if 0 <= nx < w and 0 <= ny < h and img[ny, nx] != 0:
                continue  # not a border pixel in this direction
            if _in_block_numba(img, x, y) and _deletable_numba(img, x, y):
                img[y, x] = 0
                deleted += 1
    return deleted


def _peel_pass_py(img: np.ndarray, dx: int, dy: int) -> int:
    h, w = img.shape
    ys, xs = np.nonzero(img)  # row-major, same visit order as the dense scan
    deleted = 0
    for y, x in zip(ys.tolist(), xs.tolist()):
        nx = x + dx
        ny = y + dy
        if 0 <= nx < w and 0 <= ny < h and img[ny, nx] != 0:
            continue
        if _in_block_py(img, x, y) and _deletable_py(img, x, y):
            img[y, x] = 0
            deleted += 1
    return deleted


def _break_blocks(img: np.ndarray) -> int:
    """Break any remaining 2x2 all-ones blocks (rare, junction clusters)."""
    if img.shape[0] < 2 or img.shape[1] < 2:
        return 0
    blocks = (img[:-1, :-1] != 0) & (img[1:, :-1] != 0) & (img[:-1, 1:] != 0) & (img[1:, 1:] != 0)
    changed = 0
    for y, x in zip(*np.nonzero(blocks)):
        cells = ((y, x), (y, x + 1), (y + 1, x), (y + 1, x + 1))
        if not all(img[cy, cx] for cy, cx in cells):
            continue  # already broken by a previous deletion
        for cy, cx in cells:
            if _deletable_py(img, cx, cy):
                img[cy, cx] = 0
                changed += 1
                break
        else:
            # locked block: every pixel anchors a diagonal branch; sacrifice one
            img[y + 1, x + 1] = 0
            changed += 1
    return changed


def morph_thin(b: BinaryMap) -> BinaryMap:
    """Thin to a 1-px skeleton subset: no 2x2 all-ones block remains."""
    img = np.ascontiguousarray(b, dtype=np.uint8).copy()
    peel = _peel_pass_numba if NUMBA_ENABLED else _peel_pass_py
    while True:
        while True:
            n = 0
            for dx, dy in _DIRECTIONS:
                n += peel(img, dx, dy)
            if n == 0:
                break
        if _break_blocks(img) == 0:
            break
    return img.astype(bool)
