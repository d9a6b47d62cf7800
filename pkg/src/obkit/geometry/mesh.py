"""Indexed triangle meshes with per-triangle instance ids and edge adjacency.

Meshes load from wavefront-style text (``v``/``f`` records, polygons
fan-triangulated). Each named object group (``o``/``g``) becomes one
instance id, consecutive from 0 in order of first appearance; faces seen
before any group statement belong to instance 0. Zero-area faces are
dropped and counted, not fatal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ParseError

__all__ = ["SceneMesh", "load_obj", "make_mesh"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SceneMesh:
    vertices: np.ndarray  # (n, 3) float64
    triangles: np.ndarray  # (m, 3) int32
    instance_ids: np.ndarray  # (m,) int32
    adjacency: np.ndarray  # (m, 3) int32, -1 where no edge neighbor
    dropped_faces: int = 0
    centroids: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        t = np.ascontiguousarray(self.triangles, dtype=np.int32)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        object.__setattr__(self, "instance_ids", np.ascontiguousarray(self.instance_ids, dtype=np.int32))
        object.__setattr__(self, "adjacency", np.ascontiguousarray(self.adjacency, dtype=np.int32))
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise ParseError("triangle vertex index out of range")
        cent = v[t].mean(axis=1) if len(t) else np.zeros((0, 3))
        object.__setattr__(self, "centroids", cent)

    @property
    def n_triangles(self) -> int:
        return int(len(self.triangles))

    def triangle_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.triangles[:, i]] for i in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if not len(self.vertices):
            return np.zeros(3), np.zeros(3)
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def diameter(self) -> float:
        lo, hi = self.bounds()
        return float(np.linalg.norm(hi - lo))


def _build_adjacency(triangles: np.ndarray) -> np.ndarray:
    """Edge-sharing neighbor per triangle edge; -1 for boundary/non-manifold."""
    m = len(triangles)
    adj = np.full((m, 3), -1, dtype=np.int32)
    edge_owner: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for ti, (a, b, c) in enumerate(triangles.tolist()):
        for slot, (u, v) in enumerate(((a, b), (b, c), (c, a))):
            key = (u, v) if u < v else (v, u)
            edge_owner.setdefault(key, []).append((ti, slot))
    for owners in edge_owner.values():
        if len(owners) == 2:
            (t0, s0), (t1, s1) = owners
            adj[t0, s0] = t1
            adj[t1, s1] = t0
        elif len(owners) > 2:
            log.warning("non-manifold edge shared by %d triangles; left unlinked", len(owners))
    return adj


def make_mesh(vertices, faces, face_instances) -> SceneMesh:
    """Triangulate polygon faces (fan), drop degenerates, build adjacency."""
    vertices = np.asarray(vertices, dtype=np.float64)
    tri_list: list[tuple[int, int, int]] = []
    inst_list: list[int] = []
    for face, inst in zip(faces, face_instances):
        if len(face) < 3:
            raise ParseError(f"face with {len(face)} vertices")
        for k in range(1, len(face) - 1):
            tri_list.append((face[0], face[k], face[k + 1]))
            inst_list.append(inst)
    tris = np.asarray(tri_list, dtype=np.int32).reshape(-1, 3)
    insts = np.asarray(inst_list, dtype=np.int32)
    if tris.size and (tris.min() < 0 or tris.max() >= len(vertices)):
        raise ParseError("face refers to a vertex index out of range")
    if len(tris):
        a, b, c = (vertices[tris[:, i]] for i in range(3))
        areas = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
        keep = areas > 0.0
        dropped = int((~keep).sum())
        if dropped:
            log.warning("dropped %d zero-area faces", dropped)
        tris, insts = tris[keep], insts[keep]
    else:
        dropped = 0
    return SceneMesh(
        vertices=vertices,
        triangles=tris,
        instance_ids=insts,
        adjacency=_build_adjacency(tris),
        dropped_faces=dropped,
    )


def load_obj(path) -> SceneMesh:
    """Parse a wavefront-style mesh file (v/f/o/g records)."""
    path = Path(path)
    vertices: list[tuple[float, float, float]] = []
    faces: list[list[int]] = []
    face_instances: list[int] = []
    instance_by_name: dict[str, int] = {}
    current_name = ""  # ungrouped faces form an implicit group

    def resolve(token: str) -> int:
        idx_str = token.split("/")[0]
        try:
            idx = int(idx_str)
        except ValueError as e:
            raise ParseError(f"{path}: bad face index {token!r}") from e
        if idx > 0:
            return idx - 1
        if idx < 0:
            return len(vertices) + idx
        raise ParseError(f"{path}: face index 0 is invalid")

    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read mesh file {path}: {e}") from e

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError(f"{path}:{lineno}: vertex needs 3 coordinates")
            try:
                vertices.append((float(parts[1]), float(parts[2]), float(parts[3])))
            except ValueError as e:
                raise ParseError(f"{path}:{lineno}: bad vertex coordinate") from e
        elif tag in ("o", "g"):
            current_name = " ".join(parts[1:]) or f"group{len(instance_by_name)}"
        elif tag == "f":
            if len(parts) < 4:
                raise ParseError(f"{path}:{lineno}: face needs at least 3 vertices")
            face = [resolve(tok) for tok in parts[1:]]
            if any(i < 0 or i >= len(vertices) for i in face):
                raise ParseError(f"{path}:{lineno}: face vertex index out of range")
            faces.append(face)
            face_instances.append(instance_by_name.setdefault(current_name, len(instance_by_name)))
        # vt/vn/usemtl/mtllib/s records are ignored
    if not vertices:
        raise ParseError(f"{path}: no vertices found")
    return make_mesh(np.asarray(vertices), faces, face_instances)
