"""Plane-side classification of mesh triangles (the render visibility mask).

A triangle is rendered when it sits on the non-negative side of the slicing
plane.  Two rules are exposed because "distance of a polygon" is ambiguous:
``centroid`` scores one representative point per triangle (the default),
``any_vertex`` keeps a triangle as long as any corner survives, which is the
conservative choice for rendering.  Degenerate triangles classify like any
other; they never raise.
"""
from __future__ import annotations

import numpy as np

from .. import kernels
from .mesh import TriangleMesh
from .plane import Plane

RULE_CENTROID = "centroid"
RULE_ANY_VERTEX = "any_vertex"
_RULES = (RULE_CENTROID, RULE_ANY_VERTEX)


def signed_distances(points: np.ndarray, plane: Plane) -> np.ndarray:
    """Signed distances of an (n, 3) point array to the plane."""
    pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    return kernels.signed_distances(pts, plane.a, plane.b, plane.c, plane.d)


def classify_triangles(mesh: TriangleMesh, plane: Plane,
                       rule: str = RULE_CENTROID) -> np.ndarray:
    """Boolean visibility mask, one entry per triangle."""
    if rule not in _RULES:
        raise ValueError(f"rule must be one of {_RULES}, got {rule!r}")
    if mesh.n_triangles == 0:
        return np.zeros(0, dtype=bool)
    if rule == RULE_CENTROID:
        return kernels.classify_centroid(mesh.vertices, mesh.triangles,
                                         plane.a, plane.b, plane.c, plane.d)
    return kernels.classify_any_vertex(mesh.vertices, mesh.triangles,
                                       plane.a, plane.b, plane.c, plane.d)
