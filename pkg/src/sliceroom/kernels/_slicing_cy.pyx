# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the per-triangle slicing hot path.

Must stay numerically in lockstep with _slicing_np.py: same operand order,
no fused multiply-adds (built with -ffp-contract=off), division by 3.0.
"""
import numpy as np

cimport numpy as cnp


def signed_distances(double[:, ::1] points, double a, double b, double c, double d):
    cdef Py_ssize_t n = points.shape[0]
    cdef cnp.ndarray out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    for i in range(n):
        o[i] = points[i, 0] * a + points[i, 1] * b + points[i, 2] * c - d
    return out


def classify_centroid(double[:, ::1] vertices, int[:, ::1] triangles,
                      double a, double b, double c, double d):
    cdef Py_ssize_t m = triangles.shape[0]
    cdef cnp.ndarray out = np.empty(m, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t t
    cdef int i0, i1, i2
    cdef double cx, cy, cz, dist
    for t in range(m):
        i0 = triangles[t, 0]
        i1 = triangles[t, 1]
        i2 = triangles[t, 2]
        cx = (vertices[i0, 0] + vertices[i1, 0] + vertices[i2, 0]) / 3.0
        cy = (vertices[i0, 1] + vertices[i1, 1] + vertices[i2, 1]) / 3.0
        cz = (vertices[i0, 2] + vertices[i1, 2] + vertices[i2, 2]) / 3.0
        dist = cx * a + cy * b + cz * c - d
        o[t] = 1 if dist >= 0.0 else 0
    return out.view(np.bool_)


def classify_any_vertex(double[:, ::1] vertices, int[:, ::1] triangles,
                        double a, double b, double c, double d):
    cdef Py_ssize_t m = triangles.shape[0]
    cdef cnp.ndarray out = np.empty(m, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t t
    cdef int i, idx
    cdef double dist
    cdef unsigned char vis
    for t in range(m):
        vis = 0
        for i in range(3):
            idx = triangles[t, i]
            dist = vertices[idx, 0] * a + vertices[idx, 1] * b + vertices[idx, 2] * c - d
            if dist >= 0.0:
                vis = 1
                break
        o[t] = vis
    return out.view(np.bool_)


def triangle_cross_products(double[:, ::1] vertices, int[:, ::1] triangles):
    cdef Py_ssize_t m = triangles.shape[0]
    cdef cnp.ndarray out = np.empty((m, 3), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t t
    cdef int i0, i1, i2
    cdef double e1x, e1y, e1z, e2x, e2y, e2z
    for t in range(m):
        i0 = triangles[t, 0]
        i1 = triangles[t, 1]
        i2 = triangles[t, 2]
        e1x = vertices[i1, 0] - vertices[i0, 0]
        e1y = vertices[i1, 1] - vertices[i0, 1]
        e1z = vertices[i1, 2] - vertices[i0, 2]
        e2x = vertices[i2, 0] - vertices[i0, 0]
        e2y = vertices[i2, 1] - vertices[i0, 1]
        e2z = vertices[i2, 2] - vertices[i0, 2]
        o[t, 0] = e1y * e2z - e1z * e2y
        o[t, 1] = e1z * e2x - e1x * e2z
        o[t, 2] = e1x * e2y - e1y * e2x
    return out
