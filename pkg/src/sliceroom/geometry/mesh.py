"""Indexed triangle meshes with an outer/inner face tag per triangle."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

# Triangles whose area is below this fraction of the squared bounding-box
# diagonal are treated as degenerate (medical meshes contain slivers).
DEGENERATE_AREA_FACTOR = 1e-12


class MeshError(ValueError):
    pass


class FaceTag(IntEnum):
    OUTER = 0
    INNER = 1


@dataclass(eq=False)
class TriangleMesh:
    vertices: np.ndarray                    # (n, 3) float64
    triangles: np.ndarray                   # (m, 3) int32
    face_tags: np.ndarray = field(default=None)  # (m,) uint8, default all OUTER

    def __post_init__(self) -> None:
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int32).reshape(-1, 3)
        if self.face_tags is None:
            self.face_tags = np.full(len(self.triangles), FaceTag.OUTER, dtype=np.uint8)
        else:
            self.face_tags = np.ascontiguousarray(self.face_tags, dtype=np.uint8).reshape(-1)
        if len(self.face_tags) != len(self.triangles):
            raise MeshError("face_tags length must match triangle count")
        if self.triangles.size:
            lo = int(self.triangles.min())
            hi = int(self.triangles.max())
            if lo < 0 or hi >= len(self.vertices):
                raise MeshError(
                    f"triangle index out of range: {lo if lo < 0 else hi} "
                    f"with {len(self.vertices)} vertices")

    @classmethod
    def from_lists(cls, vertices, triangles, face_tags=None) -> "TriangleMesh":
        return cls(np.asarray(vertices, dtype=np.float64).reshape(-1, 3),
                   np.asarray(triangles, dtype=np.int32).reshape(-1, 3),
                   None if face_tags is None else np.asarray(face_tags))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def copy(self) -> "TriangleMesh":
        return TriangleMesh(self.vertices.copy(), self.triangles.copy(), self.face_tags.copy())


def make_double_sided(mesh: TriangleMesh) -> TriangleMesh:
    """Duplicate every triangle with reversed winding, tagged as inner face.

    Rendering backends that draw only front faces then show both sides, and
    the inner copies can be shaded darker to fill hollow regions at a cut.
    Vertices are shared, triangle count exactly doubles: originals first
    (outer), then (i, j, k) -> (i, k, j) duplicates (inner).
    """
    if np.any(mesh.face_tags == FaceTag.INNER):
        raise MeshError("mesh already contains inner-tagged triangles "
                        "(double-sided generation applied twice?)")
    reversed_tris = mesh.triangles[:, [0, 2, 1]]
    return TriangleMesh(
        mesh.vertices,
        np.concatenate([mesh.triangles, reversed_tris]),
        np.concatenate([
            np.full(mesh.n_triangles, FaceTag.OUTER, dtype=np.uint8),
            np.full(mesh.n_triangles, FaceTag.INNER, dtype=np.uint8),
        ]),
    )
