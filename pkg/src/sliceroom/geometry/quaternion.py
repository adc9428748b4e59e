"""Unit quaternion algebra for shared-orientation bookkeeping.

Conventions: Hamilton product, scalar-first component order (w, x, y, z),
rotation of a vector v is the sandwich q v q*.  ``a.compose(b)`` (also
``a * b``) is the rotation "apply b, then a", which is what world-frame
delta pre-multiplication needs.

q and -q describe the same rotation; nothing here canonicalizes the sign,
so equality-of-rotation checks must go through :meth:`rotation_diff` or
compare the action on vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

UNIT_TOL = 1e-9

Vec3 = tuple[float, float, float]
Mat3 = tuple[tuple[float, float, float],
             tuple[float, float, float],
             tuple[float, float, float]]


@dataclass(frozen=True, slots=True)
class Quaternion:
    w: float
    x: float
    y: float
    z: float

    @staticmethod
    def identity() -> "Quaternion":
        return Quaternion(1.0, 0.0, 0.0, 0.0)

    @staticmethod
    def from_axis_angle(axis: Vec3, angle: float) -> "Quaternion":
        """Rotation of `angle` radians about `axis` (need not be unit length)."""
        ax, ay, az = axis
        n = math.sqrt(ax * ax + ay * ay + az * az)
        if n <= 0.0 or not math.isfinite(n):
            raise ValueError("rotation axis must be a finite nonzero vector")
        half = 0.5 * angle
        s = math.sin(half) / n
        return Quaternion(math.cos(half), ax * s, ay * s, az * s).normalized()

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x
                         + self.y * self.y + self.z * self.z)

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> "Quaternion":
        n = self.norm()
        if n <= 0.0 or not math.isfinite(n):
            raise ValueError("cannot normalize a zero or non-finite quaternion")
        return Quaternion(self.w / n, self.x / n, self.y / n, self.z / n)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def compose(self, other: "Quaternion") -> "Quaternion":
        """Hamilton product self ⊗ other, renormalized.

        Acting on a vector, the result applies `other` first, then `self`.
        """
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Quaternion(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 + y1 * w2 + z1 * x2 - x1 * z2,
            w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
        ).normalized()

    __mul__ = compose

    def rotate(self, v: Vec3) -> Vec3:
        """Rotate a 3-vector by the sandwich product q v q*."""
        # q * (0, v)
        vx, vy, vz = v
        w, x, y, z = self.w, self.x, self.y, self.z
        aw = -x * vx - y * vy - z * vz
        ax = w * vx + y * vz - z * vy
        ay = w * vy + z * vx - x * vz
        az = w * vz + x * vy - y * vx
        # (...) * conj(q)
        return (
            -aw * x + ax * w - ay * z + az * y,
            -aw * y + ay * w - az * x + ax * z,
            -aw * z + az * w - ax * y + ay * x,
        )

    def to_matrix(self) -> Mat3:
        """Equivalent rotation matrix, row-major; orthonormal with det +1."""
        w, x, y, z = self.w, self.x, self.y, self.z
        xx, yy, zz = x * x, y * y, z * z
        xy, xz, yz = x * y, x * z, y * z
        wx, wy, wz = w * x, w * y, w * z
        return (
            (1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)),
            (2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)),
            (2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)),
        )

    def rotation_diff(self, other: "Quaternion") -> float:
        """Max componentwise distance to `other`, minimized over the q/-q sign."""
        direct = max(abs(self.w - other.w), abs(self.x - other.x),
                     abs(self.y - other.y), abs(self.z - other.z))
        flipped = max(abs(self.w + other.w), abs(self.x + other.x),
                      abs(self.y + other.y), abs(self.z + other.z))
        return min(direct, flipped)
