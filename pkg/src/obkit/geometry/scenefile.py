"""Scene description documents.

A scene is one key-value text file; ``#`` starts a comment. Keys:

    mesh                 path to the wavefront mesh, relative to this file
    supersample          1 or 2 (optional, default 1)
    camera.width         canvas width in pixels
    camera.height        canvas height in pixels
    camera.fx/.fy        focal lengths in pixels
    camera.cx/.cy        principal point in pixels
    camera.rotation      nine numbers, row-major 3x3 world-to-camera
    camera.translation   three numbers, meters

Unknown keys are rejected so typos cannot silently change a render.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ParseError
from .camera import PinholeCamera
from .mesh import SceneMesh, load_obj

__all__ = ["SceneDescription", "parse_scene_file", "load_scene"]

_KNOWN = {
    "mesh", "supersample",
    "camera.width", "camera.height", "camera.fx", "camera.fy",
    "camera.cx", "camera.cy", "camera.rotation", "camera.translation",
}
_REQUIRED = _KNOWN - {"supersample"}


@dataclass(frozen=True)
class SceneDescription:
    mesh_path: Path
    camera: PinholeCamera
    supersample: int = 1


def parse_scene_file(path) -> SceneDescription:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read scene file {path}: {e}") from e
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key not in _KNOWN:
            raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ParseError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = rest.strip()
    missing = _REQUIRED - values.keys()
    if missing:
        raise ParseError(f"{path}: missing keys: {', '.join(sorted(missing))}")

    def floats(key: str, n: int) -> list[float]:
        toks = values[key].split()
        if len(toks) != n:
            raise ParseError(f"{path}: {key} needs {n} numbers, got {len(toks)}")
        try:
            return [float(t) for t in toks]
        except ValueError as e:
            raise ParseError(f"{path}: {key} has a non-numeric value") from e

    supersample = 1
    if "supersample" in values:
        if values["supersample"] not in ("1", "2"):
            raise ParseError(f"{path}: supersample must be 1 or 2")
        supersample = int(values["supersample"])
    cam = PinholeCamera(
        fx=floats("camera.fx", 1)[0],
        fy=floats("camera.fy", 1)[0],
        cx=floats("camera.cx", 1)[0],
        cy=floats("camera.cy", 1)[0],
        width=int(floats("camera.width", 1)[0]),
        height=int(floats("camera.height", 1)[0]),
        rotation=np.array(floats("camera.rotation", 9)).reshape(3, 3),
        translation=np.array(floats("camera.translation", 3)),
    )
    mesh_path = Path(values["mesh"])
    if not mesh_path.is_absolute():
        mesh_path = path.parent / mesh_path
    return SceneDescription(mesh_path=mesh_path, camera=cam, supersample=supersample)


def load_scene(path) -> tuple[SceneMesh, PinholeCamera, SceneDescription]:
    """Parse a scene file and load its mesh; camera invariants are enforced."""
    desc = parse_scene_file(path)
    mesh = load_obj(desc.mesh_path)
    return mesh, desc.camera, desc
