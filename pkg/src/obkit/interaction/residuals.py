"""FN/FP residual extraction and the stage-1 segment sources.

Residuals compare a thinned prediction with GT under a Euclidean match
tolerance: a GT pixel missing from the prediction within the tolerance is
a false negative, a predicted pixel unsupported by GT is a false
positive. Survivors are traced into boundary segments.

Stage-1 sources bootstrap scribbles without a model: FN segments are a
random subset of the GT's traced segments; FP segments come from
classical gradient-hysteresis (Canny-style) edges of the image that lie
away from every GT pixel.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..errors import DimensionMismatchError, NotThinError
from ..raster import BinaryMap, has_2x2_block, morph_thin, trace_segments
from ..raster.nms import gradient_xy, nms_thin

__all__ = [
    "extract_residual_segments",
    "stage1_fn_source",
    "stage1_fp_source",
    "luminance",
    "canny_edges",
]


def extract_residual_segments(pred: BinaryMap, gt: BinaryMap, match_tolerance: float):
    """(fn_segments, fp_segments) of pred against gt."""
    if pred.shape != gt.shape:
        raise DimensionMismatchError(f"pred {pred.shape} vs gt {gt.shape}")
    if match_tolerance < 0:
        raise ValueError("match tolerance must be >= 0")
    for name, m in (("pred", pred), ("gt", gt)):
        if has_2x2_block(m):
            raise NotThinError(f"{name} map is not thin")
    dist_to_pred = ndimage.distance_transform_edt(~pred)
    dist_to_gt = ndimage.distance_transform_edt(~gt)
    fn_pixels = gt & (dist_to_pred > match_tolerance)
    fp_pixels = pred & (dist_to_gt > match_tolerance)
    return trace_segments(fn_pixels), trace_segments(fp_pixels)


def stage1_fn_source(gt: BinaryMap, fraction: float, rng: np.random.Generator):
    """Random subset of gt's segments; each kept with probability ``fraction``."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    return [seg for seg in trace_segments(gt) if rng.random() < fraction]


def luminance(rgb: np.ndarray) -> np.ndarray:
    """Rec.601 luma in [0, 1] from an (h, w, 3) uint8/float image."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) rgb, got {rgb.shape}")
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    if y.max() > 1.0:
        y = y / 255.0
    return np.clip(y, 0.0, 1.0)


def canny_edges(rgb: np.ndarray, sigma: float = 1.0, low: float = 0.1,
                high: float = 0.2) -> BinaryMap:
    """Gradient-hysteresis edges: smooth, Sobel, NMS, double threshold."""
    y = ndimage.gaussian_filter(luminance(rgb), sigma)
    gx, gy = gradient_xy(y, pad="edge")
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak == 0.0:
        return np.zeros(y.shape, dtype=bool)
    mag = (mag / peak).astype(np.float32)
    thin = nms_thin(mag)
    weak = thin >= low
    strong = thin >= high
    if not strong.any():
        return np.zeros(y.shape, dtype=bool)
    labels, n = ndimage.label(weak, structure=np.ones((3, 3)))
    keep_ids = np.unique(labels[strong])
    keep_ids = keep_ids[keep_ids != 0]
    return np.isin(labels, keep_ids)


def stage1_fp_source(rgb: np.ndarray, gt: BinaryMap, match_tolerance: float,
                     sigma: float = 1.0, low: float = 0.1, high: float = 0.2):
    """Segments of detected edges that are absent from the GT boundaries."""
    if rgb.shape[:2] != gt.shape:
        raise DimensionMismatchError(f"image {rgb.shape[:2]} vs gt {gt.shape}")
    edges = canny_edges(rgb, sigma=sigma, low=low, high=high)
    dist_to_gt = ndimage.distance_transform_edt(~gt)
    off_gt = edges & (dist_to_gt > match_tolerance)
    return trace_segments(morph_thin(off_gt))
