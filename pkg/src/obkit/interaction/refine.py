"""Deterministic scribble-guided refinement of a probability map.

Outside both scribble channels the previous output passes through
untouched (locality). FP-scribbled pixels are zeroed; FN-scribbled pixels
take the max of the previous output and the candidate, so scribble shapes
never print onto the result: only candidate evidence can appear, and only
where the user asked for it. Where the channels overlap the FN action
wins. Callers apply nms_thin + threshold afterwards.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatchError
from ..raster import ProbabilityMap, ThresholdConfig, nms_thin, threshold
from .scribbles import FnFpMap

__all__ = ["refine", "postprocess"]


def refine(prev: ProbabilityMap, candidate: ProbabilityMap, fnfp: FnFpMap,
           cfg: ThresholdConfig = ThresholdConfig()) -> ProbabilityMap:
    if prev.shape != candidate.shape or prev.shape != fnfp.shape:
        raise DimensionMismatchError(
            f"prev {prev.shape}, candidate {candidate.shape}, fnfp {fnfp.shape} must match"
        )
    out = prev.astype(np.float32).copy()
    out[fnfp.fp] = 0.0
    merged = np.maximum(prev, candidate)
    out[fnfp.fn] = merged[fnfp.fn]
    return out


def postprocess(p: ProbabilityMap, cfg: ThresholdConfig):
    """The standard finishing pass: NMS thinning then the threshold rule."""
    return threshold(nms_thin(p), cfg)
