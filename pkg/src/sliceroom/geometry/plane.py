"""Slicing-plane algebra: planes a·x + b·y + c·z = d with a unit normal.

The normal is kept unit length so the signed distance of a point is a true
euclidean distance, and so plane equations compare meaningfully after a trip
over the wire.  Construction leaves the coefficients untouched when they are
already unit to within 1e-9: a decoded wire plane keeps its exact bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .quaternion import Quaternion, Vec3

NORMAL_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Plane:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        n = math.sqrt(self.a * self.a + self.b * self.b + self.c * self.c)
        if n <= 1e-12 or not math.isfinite(n):
            raise ValueError("plane normal must be a finite nonzero vector")
        if not math.isfinite(self.d):
            raise ValueError("plane offset must be finite")
        if abs(n - 1.0) > NORMAL_TOL:
            object.__setattr__(self, "a", self.a / n)
            object.__setattr__(self, "b", self.b / n)
            object.__setattr__(self, "c", self.c / n)
            object.__setattr__(self, "d", self.d / n)

    def normal(self) -> Vec3:
        return (self.a, self.b, self.c)

    def signed_distance(self, point: Vec3) -> float:
        """a·x + b·y + c·z − d: positive on the normal side, magnitude euclidean."""
        x, y, z = point
        return self.a * x + self.b * y + self.c * z - self.d

    def offset(self, dd: float) -> "Plane":
        """Translate the plane by `dd` along its normal."""
        return Plane(self.a, self.b, self.c, self.d + dd)

    def rotated(self, q: Quaternion) -> "Plane":
        """Rotate the plane: points on self map onto the result under q.

        The rotation matrix is embedded in a 4×4 (the extra diagonal 1 carries
        the constant term through) and multiplied with (a, b, c, d).
        """
        m = q.to_matrix()
        m4 = (
            (m[0][0], m[0][1], m[0][2], 0.0),
            (m[1][0], m[1][1], m[1][2], 0.0),
            (m[2][0], m[2][1], m[2][2], 0.0),
            (0.0, 0.0, 0.0, 1.0),
        )
        vec = (self.a, self.b, self.c, self.d)
        out = [0.0, 0.0, 0.0, 0.0]
        for i in range(4):
            row = m4[i]
            out[i] = row[0] * vec[0] + row[1] * vec[1] + row[2] * vec[2] + row[3] * vec[3]
        return Plane(out[0], out[1], out[2], out[3])
