"""Scribble simulation: perturb boundary segments and dilate them into
the two-channel FN-FP interaction map.

Length perturbation extends or trims each endpoint independently along
the local tangent; position perturbation then jitters every pixel by an
independent integer offset of bounded Chebyshev magnitude. Dilation uses
the exact lattice disk. Border clipping happens after dilation, so a
perturbed point just outside the canvas still contributes the in-canvas
part of its disk.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DimensionMismatchError, ParseError
from ..raster import BinaryMap, BoundarySegment, dilate_disk

__all__ = [
    "ScribbleConfig",
    "FnFpMap",
    "perturb_segment",
    "simulate_scribbles",
    "Stroke",
    "parse_scribble_document",
    "scribble_document",
    "rasterize_strokes",
    "polyline_pixels",
]


@dataclass(frozen=True)
class ScribbleConfig:
    disk_radius: int = 12
    max_position_perturbation: int = 3
    length_perturbation_fraction: float = 0.2

    def __post_init__(self):
        if self.disk_radius < 0:
            raise ValueError("disk radius must be >= 0")
        if self.max_position_perturbation < 0:
            raise ValueError("position perturbation must be >= 0")
        if not 0.0 <= self.length_perturbation_fraction <= 1.0:
            raise ValueError("length perturbation fraction must lie in [0, 1]")


@dataclass(frozen=True)
class FnFpMap:
    """Two same-size binary channels; overlap between them is permitted."""

    fn: BinaryMap
    fp: BinaryMap

    def __post_init__(self):
        if self.fn.shape != self.fp.shape:
            raise DimensionMismatchError(
                f"fn {self.fn.shape} and fp {self.fp.shape} channels differ in size"
            )

    @property
    def shape(self):
        return self.fn.shape

    @classmethod
    def zeros(cls, shape) -> "FnFpMap":
        return cls(np.zeros(shape, dtype=bool), np.zeros(shape, dtype=bool))

    def is_empty(self) -> bool:
        return not (self.fn.any() or self.fp.any())


def _tangent_step(points: np.ndarray, at_end: bool) -> tuple[float, float]:
    """Unit Chebyshev step continuing the local tangent at one end."""
    k = min(4, len(points) - 1)
    if at_end:
        d = points[-1] - points[-1 - k]
    else:
        d = points[0] - points[k]
    m = max(abs(float(d[0])), abs(float(d[1])))
    if m == 0:
        return 0.0, 0.0
    return float(d[0]) / m, float(d[1]) / m


def perturb_segment(seg: BoundarySegment, cfg: ScribbleConfig, rng: np.random.Generator,
                    canvas: Optional[tuple[int, int]] = None) -> set[tuple[int, int]]:
    """Randomly lengthen/shorten, then jitter every pixel; returns a pixel set.

    When ``canvas`` is given the set is clipped to it; simulate_scribbles
    leaves clipping to the dilation stage instead.
    """
    pts = seg.points.astype(np.int64)
    n = len(pts)
    max_delta = int(np.ceil(cfg.length_perturbation_fraction * n))

    head_delta = int(rng.integers(-max_delta, max_delta + 1)) if max_delta else 0
    tail_delta = int(rng.integers(-max_delta, max_delta + 1)) if max_delta else 0

    def extend(base: np.ndarray, at_end: bool, count: int) -> list[tuple[int, int]]:
        if len(base) < 2 or count <= 0:
            return []
        sx, sy = _tangent_step(base, at_end)
        ox, oy = (base[-1] if at_end else base[0]).tolist()
        return [(int(round(ox + i * sx)), int(round(oy + i * sy))) for i in range(1, count + 1)]

    work = pts
    if head_delta < 0:
        keep = max(1, n + head_delta)  # never trim the whole segment away
        work = work[n - keep :]
    if tail_delta < 0:
        keep = max(1, len(work) + tail_delta)
        work = work[:keep]
    coords = [tuple(p) for p in work.tolist()]
    if head_delta > 0:
        coords = list(reversed(extend(work, False, head_delta))) + coords
    if tail_delta > 0:
        coords = coords + extend(work, True, tail_delta)

    arr = np.asarray(coords, dtype=np.int64)
    m = cfg.max_position_perturbation
    if m > 0:
        arr = arr + rng.integers(-m, m + 1, size=arr.shape)
    out = {(int(x), int(y)) for x, y in arr.tolist()}
    if canvas is not None:
        w, h = canvas
        out = {(x, y) for x, y in out if 0 <= x < w and 0 <= y < h}
    return out


def simulate_scribbles(fn_segs, fp_segs, cfg: ScribbleConfig, canvas: tuple[int, int],
                       rng: np.random.Generator) -> FnFpMap:
    """Perturb both segment sets and dilate each union with the disk kernel."""
    fn_points: set[tuple[int, int]] = set()
    for seg in fn_segs:
        fn_points |= perturb_segment(seg, cfg, rng)
    fp_points: set[tuple[int, int]] = set()
    for seg in fp_segs:
        fp_points |= perturb_segment(seg, cfg, rng)
    return FnFpMap(
        fn=dilate_disk(sorted(fn_points), cfg.disk_radius, canvas),
        fp=dilate_disk(sorted(fp_points), cfg.disk_radius, canvas),
    )


# ------------------------------------------------------------------ strokes
#
# The scribble document is the service/UI exchange format: JSON with a
# list of strokes, each {"channel": "fn"|"fp", "points": [[x, y], ...],
# "radius": pixels}. Rasterization dilates the stroke polyline's pixels.


@dataclass(frozen=True)
class Stroke:
    channel: str
    points: np.ndarray  # (n, 2) float -> rounded to pixels at rasterization
    radius: int

    def __post_init__(self):
        if self.channel not in ("fn", "fp"):
            raise ParseError(f"stroke channel must be fn or fp, got {self.channel!r}")
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        if len(pts) < 1:
            raise ParseError("stroke needs at least one point")
        if self.radius < 0:
            raise ParseError("stroke radius must be >= 0")
        object.__setattr__(self, "points", pts)


def parse_scribble_document(text_or_obj) -> list[Stroke]:
    if isinstance(text_or_obj, (str, bytes)):
        try:
            obj = json.loads(text_or_obj)
        except json.JSONDecodeError as e:
            raise ParseError(f"scribble document is not valid JSON: {e}") from e
    else:
        obj = text_or_obj
    if isinstance(obj, dict):
        obj = obj.get("strokes")
    if not isinstance(obj, list):
        raise ParseError("scribble document must be a list of strokes")
    strokes = []
    for i, raw in enumerate(obj):
        if not isinstance(raw, dict):
            raise ParseError(f"stroke {i} is not an object")
        try:
            strokes.append(Stroke(channel=raw["channel"], points=raw["points"],
                                  radius=int(raw.get("radius", 12))))
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"stroke {i} malformed: {e}") from e
    return strokes


def scribble_document(strokes) -> str:
    return json.dumps(
        {"strokes": [
            {"channel": s.channel, "points": [[float(x), float(y)] for x, y in s.points],
             "radius": int(s.radius)}
            for s in strokes
        ]},
        separators=(",", ":"),
    )


def polyline_pixels(points: np.ndarray) -> list[tuple[int, int]]:
    """Bresenham walk over consecutive point pairs (integer pixel chain)."""
    pts = np.rint(np.asarray(points, dtype=np.float64)).astype(np.int64)
    out: list[tuple[int, int]] = [tuple(pts[0].tolist())]
    for (x0, y0), (x1, y1) in zip(pts[:-1].tolist(), pts[1:].tolist()):
        dx = abs(x1 - x0)
        dy = -abs(y1 - y0)
        sx = 1 if x0 < x1 else -1
        sy = 1 if y0 < y1 else -1
        err = dx + dy
        x, y = x0, y0
        while (x, y) != (x1, y1):
            e2 = 2 * err
            if e2 >= dy:
                err += dy
                x += sx
            if e2 <= dx:
                err += dx
                y += sy
            out.append((x, y))
    return out


def rasterize_strokes(strokes, canvas: tuple[int, int]) -> FnFpMap:
    """Service-side stroke rasterization: disk dilation over polyline pixels."""
    fn = np.zeros((canvas[1], canvas[0]), dtype=bool)
    fp = np.zeros((canvas[1], canvas[0]), dtype=bool)
    target = {"fn": fn, "fp": fp}
    for stroke in strokes:
        pix = polyline_pixels(stroke.points)
        target[stroke.channel] |= dilate_disk(pix, stroke.radius, canvas)
    return FnFpMap(fn=fn, fp=fp)
