"""Segment selection for scribble generation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..raster import BoundarySegment

__all__ = ["SelectionConfig", "select_segments"]


@dataclass(frozen=True)
class SelectionConfig:
    """Which residual segments become scribbles.

    Only segments strictly longer than ``min_segment_length`` qualify;
    the longest ones are taken first. ``max_segments`` None means
    unlimited (the ablation operating point limits it to 12).
    """

    min_segment_length: int = 30
    max_segments: Optional[int] = None

    def __post_init__(self):
        if self.min_segment_length < 1:
            raise ValueError("min segment length must be >= 1")
        if self.max_segments is not None and self.max_segments < 0:
            raise ValueError("max_segments must be >= 0 or None")


def select_segments(segs, cfg: SelectionConfig) -> list[BoundarySegment]:
    """Longest-first selection of segments longer than the cutoff.

    Length ties break by first-pixel row-major order so selection is
    deterministic regardless of input order.
    """
    qualifying = [s for s in segs if len(s) > cfg.min_segment_length]
    qualifying.sort(key=lambda s: (-len(s), int(s.points[0, 1]), int(s.points[0, 0])))
    if cfg.max_segments is not None:
        qualifying = qualifying[: cfg.max_segments]
    return qualifying
