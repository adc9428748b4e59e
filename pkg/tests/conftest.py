"""Shared fixtures: reference meshes and the acceptance result lines."""
from __future__ import annotations

import math

import numpy as np
import pytest

from sliceroom.geometry import TriangleMesh

# Unit cube in [0,1]^3.  Vertex index encodes coordinates as binary
# 4x+2y+z, faces are split into two triangles each with outward winding:
#
#   v0=(0,0,0) v1=(0,0,1) v2=(0,1,0) v3=(0,1,1)
#   v4=(1,0,0) v5=(1,0,1) v6=(1,1,0) v7=(1,1,1)
CUBE_VERTICES = [(float(x), float(y), float(z))
                 for x in (0, 1) for y in (0, 1) for z in (0, 1)]
CUBE_TRIANGLES = [
    (0, 1, 3), (0, 3, 2),  # x = 0, normal -x
    (4, 6, 7), (4, 7, 5),  # x = 1, normal +x
    (0, 4, 5), (0, 5, 1),  # y = 0, normal -y
    (2, 3, 7), (2, 7, 6),  # y = 1, normal +y
    (0, 2, 6), (0, 6, 4),  # z = 0, normal -z
    (1, 5, 7), (1, 7, 3),  # z = 1, normal +z
]


@pytest.fixture
def unit_cube() -> TriangleMesh:
    return TriangleMesh.from_lists(CUBE_VERTICES, CUBE_TRIANGLES)


def build_icosphere(subdivisions: int = 2, radius: float = 1.0) -> TriangleMesh:
    """Icosahedron subdivided toward a sphere; deterministic construction."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = [(-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
           (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
           (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1)]
    vertices = []
    for x, y, z in raw:
        n = math.sqrt(x * x + y * y + z * z)
        vertices.append((radius * x / n, radius * y / n, radius * z / n))
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    midpoints: dict[tuple[int, int], int] = {}

    def midpoint(i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        cached = midpoints.get(key)
        if cached is not None:
            return cached
        ax, ay, az = vertices[i]
        bx, by, bz = vertices[j]
        mx, my, mz = (ax + bx) / 2.0, (ay + by) / 2.0, (az + bz) / 2.0
        n = math.sqrt(mx * mx + my * my + mz * mz)
        vertices.append((radius * mx / n, radius * my / n, radius * mz / n))
        midpoints[key] = len(vertices) - 1
        return midpoints[key]

    for _ in range(subdivisions):
        split = []
        for i, j, k in faces:
            a, b, c = midpoint(i, j), midpoint(j, k), midpoint(k, i)
            split.extend([(i, a, c), (j, b, a), (k, c, b), (a, b, c)])
        faces = split
    return TriangleMesh.from_lists(vertices, faces)


@pytest.fixture(scope="session")
def icosphere() -> TriangleMesh:
    return build_icosphere(subdivisions=2, radius=40.0)


def random_unit_quaternion(rng) -> tuple[float, float, float, float]:
    """Uniform over rotations (Shoemake's method), as raw components."""
    u1, u2, u3 = rng.random(), rng.random(), rng.random()
    a, b = math.sqrt(1.0 - u1), math.sqrt(u1)
    return (a * math.sin(2.0 * math.pi * u2), a * math.cos(2.0 * math.pi * u2),
            b * math.sin(2.0 * math.pi * u3), b * math.cos(2.0 * math.pi * u3))


def random_unit_vector(rng) -> tuple[float, float, float]:
    while True:
        x, y, z = rng.gauss(0, 1), rng.gauss(0, 1), rng.gauss(0, 1)
        n = math.sqrt(x * x + y * y + z * z)
        if n > 1e-6:
            return (x / n, y / n, z / n)


def rotate_by_sandwich(q, v):
    """Independent rotation oracle: q v q* with the Hamilton product
    written out, sharing no code with the library."""
    qw, qx, qy, qz = q
    vx, vy, vz = v
    # t = q * (0, v)
    tw = -qx * vx - qy * vy - qz * vz
    tx = qw * vx + qy * vz - qz * vy
    ty = qw * vy + qz * vx - qx * vz
    tz = qw * vz + qx * vy - qy * vx
    # r = t * conj(q)
    rx = -tw * qx + tx * qw - ty * qz + tz * qy
    ry = -tw * qy + ty * qw - tz * qx + tx * qz
    rz = -tw * qz + tz * qw - tx * qy + ty * qx
    return (rx, ry, rz)


def sample_point_on_plane(plane, rng) -> tuple[float, float, float]:
    """A random point satisfying ax+by+cz=d, via d*n plus a tangent step."""
    a, b, c = plane.a, plane.b, plane.c
    # any vector not parallel to the normal seeds a tangent basis
    seed = (1.0, 0.0, 0.0) if abs(a) < 0.9 else (0.0, 1.0, 0.0)
    tx = seed[1] * c - seed[2] * b
    ty = seed[2] * a - seed[0] * c
    tz = seed[0] * b - seed[1] * a
    n = math.sqrt(tx * tx + ty * ty + tz * tz)
    tx, ty, tz = tx / n, ty / n, tz / n
    ux = b * tz - c * ty
    uy = c * tx - a * tz
    uz = a * ty - b * tx
    s, t = rng.uniform(-20, 20), rng.uniform(-20, 20)
    return (plane.d * a + s * tx + t * ux,
            plane.d * b + s * ty + t * uy,
            plane.d * c + s * tz + t * uz)


def brute_force_mask(mesh: TriangleMesh, plane, rule: str) -> np.ndarray:
    """Independent slicing oracle: plain Python loops over the triangles."""
    a, b, c, d = plane.a, plane.b, plane.c, plane.d
    mask = np.zeros(mesh.n_triangles, dtype=bool)
    for t in range(mesh.n_triangles):
        i, j, k = mesh.triangles[t]
        p0, p1, p2 = mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]
        if rule == "centroid":
            cx = (p0[0] + p1[0] + p2[0]) / 3.0
            cy = (p0[1] + p1[1] + p2[1]) / 3.0
            cz = (p0[2] + p1[2] + p2[2]) / 3.0
            mask[t] = (cx * a + cy * b + cz * c - d) >= 0.0
        elif rule == "any_vertex":
            mask[t] = any((p[0] * a + p[1] * b + p[2] * c - d) >= 0.0
                          for p in (p0, p1, p2))
        else:
            raise ValueError(rule)
    return mask


# one PASS/FAIL line per acceptance check, printed as the suite runs
def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::", 1)[1]
    if report.when == "call":
        verdict = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {verdict}: {name}")
    elif report.when == "setup" and report.failed:
        print(f"\nACCEPTANCE FAIL: {name} (setup error)")
