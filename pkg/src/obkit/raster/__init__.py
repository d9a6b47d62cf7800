"""Raster substrate: map types, file formats, NMS, thinning, tracing, dilation."""

from .dilation import dilate_disk, disk_offsets
from .fileio import (
    MAGIC,
    load_rgb,
    mask_png_bytes,
    obfmap_bytes,
    obfmap_from_bytes,
    read_mask,
    read_obfmap,
    write_mask,
    write_obfmap,
    write_rgb,
)
from .nms import nms_thin
from .thinning import morph_thin
from .tracing import neighbor_counts, segments_to_map, trace_segments
from .types import (
    BinaryMap,
    BoundarySegment,
    ProbabilityMap,
    ThresholdConfig,
    as_binary_map,
    as_probability_map,
    has_2x2_block,
    threshold,
    validate_binary_map,
    validate_probability_map,
)

__all__ = [
    "BinaryMap",
    "BoundarySegment",
    "MAGIC",
    "ProbabilityMap",
    "ThresholdConfig",
    "as_binary_map",
    "as_probability_map",
    "dilate_disk",
    "disk_offsets",
    "has_2x2_block",
    "load_rgb",
    "mask_png_bytes",
    "morph_thin",
    "neighbor_counts",
    "nms_thin",
    "obfmap_bytes",
    "obfmap_from_bytes",
    "read_mask",
    "read_obfmap",
    "segments_to_map",
    "threshold",
    "trace_segments",
    "validate_binary_map",
    "validate_probability_map",
    "write_mask",
    "write_obfmap",
    "write_rgb",
]
