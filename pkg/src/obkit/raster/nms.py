"""Non-maximum suppression for edge probability maps.

A pixel survives only if it is a local maximum along the local gradient
direction: orientation comes from 3x3 horizontal/vertical difference
kernels, and the two neighbor values one pixel away along +/- the
orientation are obtained by bilinear interpolation (zero outside the
canvas). A pixel is suppressed only when a strictly greater sample sits
on either side, so plateau ties keep the pixel: equal-valued ridges stay
intact through junctions, where the estimated orientation can point
along the curve. Pixels with an exactly zero gradient carry no
orientation information and are kept for the same reason. Thinning of
surviving plateaus is morph_thin's job.
"""

from __future__ import annotations

import numpy as np

from .._accel import NUMBA_ENABLED, njit
from .types import ProbabilityMap

__all__ = ["nms_thin", "gradient_xy"]



def gradient_xy(p: np.ndarray, pad: str = "zero") -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel gradients, float64.

    ``zero`` padding suits probability maps (outside means no boundary);
    ``edge`` replication suits photographic content, where zero padding
    would fabricate strong gradients along the canvas border.
    """
    mode = {"zero": "constant", "edge": "edge"}[pad]
    src = np.pad(np.asarray(p, dtype=np.float64), 1, mode=mode)
    h, w = p.shape
    # differences first, so uniform regions give exactly zero gradient
    left = src[:, 0:w]
    right = src[:, 2 : w + 2]
    gx = (right[0:h] - left[0:h]) + 2.0 * (right[1 : h + 1] - left[1 : h + 1]) \
        + (right[2 : h + 2] - left[2 : h + 2])
    top = src[0:h, :]
    bottom = src[2 : h + 2, :]
    gy = (bottom[:, 0:w] - top[:, 0:w]) + 2.0 * (bottom[:, 1 : w + 1] - top[:, 1 : w + 1]) \
        + (bottom[:, 2 : w + 2] - top[:, 2 : w + 2])
    return gx, gy


@njit(cache=True)
def _nms_kernel_numba(p, gx, gy, out):  # pragma: no cover - compiled
    h, w = p.shape
    for y in range(h):
        for x in range(w):
            v = p[y, x]
            if v <= 0.0:
                continue
            a = gx[y, x]
            b = gy[y, x]
            n2 = a * a + b * b
            if n2 == 0.0:
                # no orientation information: plateau pixels are kept
                out[y, x] = v
                continue
            n = np.sqrt(n2)
            ux = a / n
            uy = b / n
            vp = _bilinear_numba(p, x + ux, y + uy)
            vm = _bilinear_numba(p, x - ux, y - uy)
            if v >= vp and v >= vm:
                out[y, x] = v


@njit(cache=True, inline="always")
def _bilinear_numba(img, xf, yf):  # pragma: no cover - compiled
    # weight products grouped as in the numpy path so both give identical bits
    h, w = img.shape
    x0 = int(np.floor(xf))
    y0 = int(np.floor(yf))
    fx = xf - x0
    fy = yf - y0
    v = 0.0
    if 0 <= y0 < h:
        if 0 <= x0 < w:
            v += img[y0, x0] * ((1.0 - fx) * (1.0 - fy))
        if 0 <= x0 + 1 < w:
            v += img[y0, x0 + 1] * (fx * (1.0 - fy))
    if 0 <= y0 + 1 < h:
        if 0 <= x0 < w:
            v += img[y0 + 1, x0] * ((1.0 - fx) * fy)
        if 0 <= x0 + 1 < w:
            v += img[y0 + 1, x0 + 1] * (fx * fy)
    return v


def _bilinear_numpy(img: np.ndarray, xf: np.ndarray, yf: np.ndarray) -> np.ndarray:
    h, w = img.shape
    x0 = np.floor(xf).astype(np.int64)
    y0 = np.floor(yf).astype(np.int64)
    fx = xf - x0
    fy = yf - y0
    out = np.zeros(xf.shape, dtype=np.float64)
    for dy, dx, wgt in (
        (0, 0, (1.0 - fx) * (1.0 - fy)),
        (0, 1, fx * (1.0 - fy)),
        (1, 0, (1.0 - fx) * fy),
        (1, 1, fx * fy),
    ):
        xi = x0 + dx
        yi = y0 + dy
        ok = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        vals = img[yi.clip(0, h - 1), xi.clip(0, w - 1)]
        out += np.where(ok, vals, 0.0) * wgt
    return out


def _nms_numpy(p64: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    h, w = p64.shape
    n2 = gx * gx + gy * gy
    n = np.sqrt(n2)
    zero = n2 == 0.0
    safe = np.where(zero, 1.0, n)
    ux = np.where(zero, 1.0, gx / safe)
    uy = np.where(zero, 0.0, gy / safe)
    ys, xs = np.mgrid[0:h, 0:w]
    vp = _bilinear_numpy(p64, xs + ux, ys + uy)
    vm = _bilinear_numpy(p64, xs - ux, ys - uy)
    return (p64 > 0.0) & (zero | ((p64 >= vp) & (p64 >= vm)))


def nms_thin(p: ProbabilityMap) -> ProbabilityMap:
    """Suppress non-maxima along the gradient; survivors keep their value."""
    p = np.asarray(p, dtype=np.float32)
    p64 = p.astype(np.float64)
    gx, gy = gradient_xy(p64)
    if NUMBA_ENABLED:
        out64 = np.zeros_like(p64)
        _nms_kernel_numba(p64, gx, gy, out64)
        keep = out64 > 0.0
    else:
        keep = _nms_numpy(p64, gx, gy)
    return np.where(keep, p, np.float32(0.0)).astype(np.float32)
