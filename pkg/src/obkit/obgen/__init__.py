"""Exact occlusion-boundary ground truth from mesh scenes."""

from .export import export_benchmark
from .generate import ObMap, generate_ob, mark_boundaries
from .occlusion import (
    LABEL_INTER,
    LABEL_NONE,
    LABEL_SELF,
    GenConfig,
    OcclusionVerdict,
    adjacency_walk_connected,
    occlusion_test,
)

__all__ = [
    "GenConfig",
    "LABEL_INTER",
    "LABEL_NONE",
    "LABEL_SELF",
    "ObMap",
    "OcclusionVerdict",
    "adjacency_walk_connected",
    "export_benchmark",
    "generate_ob",
    "mark_boundaries",
    "occlusion_test",
]
