"""NumPy fallback for the slicing hot path.

Expression order deliberately mirrors the compiled kernels (left-to-right
sums, division by 3.0, no fused ops) so both backends produce bit-identical
IEEE-754 results; keep the two files in sync.
"""
from __future__ import annotations

import numpy as np


def signed_distances(points: np.ndarray, a: float, b: float, c: float, d: float) -> np.ndarray:
    """Per-point signed distance to the plane a·x + b·y + c·z = d."""
    return points[:, 0] * a + points[:, 1] * b + points[:, 2] * c - d


def classify_centroid(vertices: np.ndarray, triangles: np.ndarray,
                      a: float, b: float, c: float, d: float) -> np.ndarray:
    """Visibility mask: triangle centroid on the non-negative side."""
    v0 = vertices[triangles[:, 0]]
    v1 = vertices[triangles[:, 1]]
    v2 = vertices[triangles[:, 2]]
    cx = (v0[:, 0] + v1[:, 0] + v2[:, 0]) / 3.0
    cy = (v0[:, 1] + v1[:, 1] + v2[:, 1]) / 3.0
    cz = (v0[:, 2] + v1[:, 2] + v2[:, 2]) / 3.0
    dist = cx * a + cy * b + cz * c - d
    return dist >= 0.0


def classify_any_vertex(vertices: np.ndarray, triangles: np.ndarray,
                        a: float, b: float, c: float, d: float) -> np.ndarray:
    """Visibility mask: any triangle vertex on the non-negative side."""
    dist = signed_distances(vertices, a, b, c, d)
    per_corner = dist[triangles] >= 0.0
    return per_corner[:, 0] | per_corner[:, 1] | per_corner[:, 2]


def triangle_cross_products(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """(v1 − v0) × (v2 − v0) per triangle; length is twice the triangle area."""
    v0 = vertices[triangles[:, 0]]
    e1 = vertices[triangles[:, 1]] - v0
    e2 = vertices[triangles[:, 2]] - v0
    out = np.empty((len(triangles), 3), dtype=np.float64)
    out[:, 0] = e1[:, 1] * e2[:, 2] - e1[:, 2] * e2[:, 1]
    out[:, 1] = e1[:, 2] * e2[:, 0] - e1[:, 0] * e2[:, 2]
    out[:, 2] = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    return out
