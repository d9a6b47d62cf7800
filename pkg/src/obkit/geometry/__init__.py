"""Triangle-mesh scenes, pinhole cameras, BVH ray casting, G-buffers."""

from .bvh import Bvh, build_bvh, cast_ray_brute, cast_rays
from .camera import PinholeCamera, pixel_ray
from .mesh import SceneMesh, load_obj, make_mesh
from .render import GBuffer, Hit, cast_ray, cast_ray_bruteforce, render_gbuffer
from .scenefile import SceneDescription, load_scene, parse_scene_file

__all__ = [
    "Bvh",
    "GBuffer",
    "Hit",
    "PinholeCamera",
    "SceneDescription",
    "SceneMesh",
    "build_bvh",
    "cast_ray",
    "cast_ray_brute",
    "cast_ray_bruteforce",
    "cast_rays",
    "load_obj",
    "load_scene",
    "make_mesh",
    "parse_scene_file",
    "pixel_ray",
    "render_gbuffer",
]
