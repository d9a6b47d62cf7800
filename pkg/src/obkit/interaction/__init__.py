"""Scribble interaction: residuals, selection, simulation, refinement."""

from .refine import postprocess, refine
from .residuals import (
    canny_edges,
    extract_residual_segments,
    luminance,
    stage1_fn_source,
    stage1_fp_source,
)
from .scribbles import (
    FnFpMap,
    ScribbleConfig,
    Stroke,
    parse_scribble_document,
    perturb_segment,
    polyline_pixels,
    rasterize_strokes,
    scribble_document,
    simulate_scribbles,
)
from .selection import SelectionConfig, select_segments

__all__ = [
    "FnFpMap",
    "ScribbleConfig",
    "SelectionConfig",
    "Stroke",
    "canny_edges",
    "extract_residual_segments",
    "luminance",
    "parse_scribble_document",
    "perturb_segment",
    "polyline_pixels",
    "postprocess",
    "rasterize_strokes",
    "refine",
    "scribble_document",
    "select_segments",
    "simulate_scribbles",
    "stage1_fn_source",
    "stage1_fp_source",
]
