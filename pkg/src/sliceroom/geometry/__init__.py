"""Numerical core: quaternions, planes, meshes, gesture deltas, slicing."""

from .mesh import DEGENERATE_AREA_FACTOR, FaceTag, MeshError, TriangleMesh, make_double_sided
from .plane import Plane
from .quaternion import Mat3, Quaternion, UNIT_TOL, Vec3
from .slicing import RULE_ANY_VERTEX, RULE_CENTROID, classify_triangles, signed_distances
from .state import (
    DEFAULT_PLANE,
    DEFAULT_SCALE_MAX,
    DEFAULT_SCALE_MIN,
    GestureDelta,
    ModelState,
    PlaneOffsetDelta,
    RotationDelta,
    PlaneRotateDelta,
    ScaleDelta,
    TwistDelta,
    apply_delta,
)

__all__ = [
    "DEGENERATE_AREA_FACTOR", "DEFAULT_PLANE", "DEFAULT_SCALE_MAX", "DEFAULT_SCALE_MIN",
    "FaceTag", "GestureDelta", "Mat3", "MeshError", "ModelState", "PlaneOffsetDelta",
    "Plane", "Quaternion", "RotationDelta", "PlaneRotateDelta", "RULE_ANY_VERTEX", "RULE_CENTROID",
    "ScaleDelta", "TriangleMesh", "TwistDelta", "UNIT_TOL", "Vec3",
    "apply_delta", "classify_triangles", "make_double_sided", "signed_distances",
]
