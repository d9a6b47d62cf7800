"""Ideal pinhole camera: intrinsics plus a rigid world-to-camera pose."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidCameraError

__all__ = ["PinholeCamera", "pixel_ray"]

_ORTHO_TOL = 1e-6


@dataclass(frozen=True)
class PinholeCamera:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)
        if not (self.fx > 0 and self.fy > 0):
            raise InvalidCameraError(f"focal lengths must be positive, got fx={self.fx} fy={self.fy}")
        if not (0 <= self.cx < self.width) or not (0 <= self.cy < self.height):
            raise InvalidCameraError(
                f"principal point ({self.cx}, {self.cy}) outside {self.width}x{self.height} canvas"
            )
        if self.width <= 0 or self.height <= 0:
            raise InvalidCameraError("canvas dimensions must be positive")
        if np.abs(R @ R.T - np.eye(3)).max() > _ORTHO_TOL:
            raise InvalidCameraError("rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > _ORTHO_TOL:
            raise InvalidCameraError("rotation determinant must be +1")

    @property
    def center(self) -> np.ndarray:
        """Camera center in world coordinates."""
        return -self.rotation.T @ self.translation

    def world_to_camera(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return pts @ self.rotation.T + self.translation

    def project(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """World points to continuous pixel coordinates and camera-frame z."""
        cam = self.world_to_camera(pts)
        z = cam[:, 2]
        u = self.fx * cam[:, 0] / z + self.cx
        v = self.fy * cam[:, 1] / z + self.cy
        return np.stack([u, v], axis=1), z


def pixel_ray(cam: PinholeCamera, x: int, y: int, jitter=(0.0, 0.0)):
    """World-frame ray through image point (x + jitter_x, y + jitter_y).

    Returns (origin, unit direction).
    """
    if not (0 <= x < cam.width and 0 <= y < cam.height):
        raise ValueError(f"pixel ({x}, {y}) outside {cam.width}x{cam.height} canvas")
    jx, jy = jitter
    if not (0.0 <= jx < 1.0 and 0.0 <= jy < 1.0):
        raise ValueError("jitter must lie in [0, 1)^2")
    d = np.array([(x + jx - cam.cx) / cam.fx, (y + jy - cam.cy) / cam.fy, 1.0])
    d /= np.linalg.norm(d)
    return cam.center, cam.rotation.T @ d
