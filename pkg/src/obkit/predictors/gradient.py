"""Classical gradient-magnitude baseline predictor."""

from __future__ import annotations

import numpy as np

from ..errors import MissingInputError
from ..interaction.residuals import luminance
from ..raster import ProbabilityMap
from ..raster.nms import gradient_xy

__all__ = ["gradient_predictor"]


def gradient_predictor(rgb) -> ProbabilityMap:
    """Luminance Sobel magnitude, normalized by its 99th percentile."""
    if rgb is None:
        raise MissingInputError("gradient predictor needs an rgb image")
    gx, gy = gradient_xy(luminance(rgb), pad="edge")
    mag = np.hypot(gx, gy)
    scale = np.percentile(mag, 99)
    if scale <= 0.0:
        return np.zeros(mag.shape, dtype=np.float32)
    return np.clip(mag / scale, 0.0, 1.0).astype(np.float32)
