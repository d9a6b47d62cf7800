"""Analytic mesh scenes shared by the obgen tests and the acceptance suite."""

import numpy as np

from obkit.geometry import PinholeCamera, make_mesh


def make_cam(size=64, f=None, z_off=0.0):
    f = f if f is not None else float(size)
    return PinholeCamera(
        fx=f, fy=f, cx=size / 2, cy=size / 2, width=size, height=size,
        rotation=np.eye(3), translation=np.array([0.0, 0.0, z_off]),
    )


def quad_verts(x0, x1, y0, y1, z):
    return [[x0, y0, z], [x1, y0, z], [x1, y1, z], [x0, y1, z]]


def single_quad_scene(z=2.0, half=0.5):
    """One fronto-parallel square; its outline is the analytic OB."""
    mesh = make_mesh(np.array(quad_verts(-half, half, -half, half, z)), [[0, 1, 2, 3]], [0])
    return mesh


def abutting_quads_scene(z=2.0):
    """Two coplanar quads of different instances meeting at x=0 (no shared verts)."""
    verts = np.array(quad_verts(-1.0, 0.0, -1.0, 1.0, z) + quad_verts(0.0, 1.0, -1.0, 1.0, z))
    return make_mesh(verts, [[0, 1, 2, 3], [4, 5, 6, 7]], [0, 1])


def near_far_scene(z_near=1.0, z_far=3.0):
    """Small near quad (instance 0) partially overlapping a big far quad (instance 1)."""
    verts = np.array(
        quad_verts(-0.25, 0.05, -0.25, 0.05, z_near) + quad_verts(-0.9, 0.9, -0.9, 0.9, z_far)
    )
    return make_mesh(verts, [[0, 1, 2, 3], [4, 5, 6, 7]], [0, 1])


def folded_sheet_scene():
    """Single-instance sheet with a wedge flap touching it along one line.

    The flap floats above the sheet at its near edge and meets the sheet at
    the far edge, so the self-occlusion boundary fades out mid-image: the
    canonical non-closed OB.
    """
    sheet = quad_verts(-1.0, 1.0, -1.0, 1.0, 2.0)
    flap = [[-0.5, -0.3, 1.0], [0.5, -0.3, 1.0], [0.5, 0.5, 2.0], [-0.5, 0.5, 2.0]]
    verts = np.array(sheet + flap)
    return make_mesh(verts, [[0, 1, 2, 3], [4, 5, 6, 7]], [0, 0])


def projected_rect(cam, x0, x1, y0, y1, z, n=300):
    """Dense samples of the rectangle outline projected into the image."""
    corners = np.array(
        [[x0, y0, z], [x1, y0, z], [x1, y1, z], [x0, y1, z], [x0, y0, z]]
    )
    uv, _ = cam.project(corners)
    pts = []
    for a, b in zip(uv[:-1], uv[1:]):
        for s in np.linspace(0.0, 1.0, n // 4, endpoint=False):
            pts.append(a + s * (b - a))
    return np.array(pts)


def boundary_pixel_centers(ob_mask):
    ys, xs = np.nonzero(ob_mask)
    return np.stack([xs + 0.5, ys + 0.5], axis=1)


def hausdorff(pts_a, pts_b):
    """Symmetric Hausdorff distance between two 2D point sets."""
    if len(pts_a) == 0 or len(pts_b) == 0:
        return np.inf
    d = np.linalg.norm(pts_a[:, None, :] - pts_b[None, :, :], axis=2)
    return max(d.min(axis=1).max(), d.min(axis=0).max())
