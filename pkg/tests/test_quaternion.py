"""Quaternion algebra against an independently coded sandwich oracle."""
import math
import random

import pytest
from hypothesis import given, strategies as st

from sliceroom.geometry import Quaternion

from conftest import random_unit_quaternion, random_unit_vector, rotate_by_sandwich

SQ2 = math.sqrt(2.0) / 2.0


def test_identity_compose_is_identity():
    q = Quaternion.from_axis_angle((0.0, 0.0, 1.0), 0.7)
    assert Quaternion.identity().compose(q) == q
    assert q.compose(Quaternion.identity()) == q


def test_same_axis_angles_add():
    ninety_x = Quaternion.from_axis_angle((1.0, 0.0, 0.0), math.pi / 2)
    combined = ninety_x.compose(ninety_x)
    # 180 degrees about x is (0, 1, 0, 0) up to sign
    assert combined.rotation_diff(Quaternion(0.0, 1.0, 0.0, 0.0)) < 1e-12


def test_compose_order_is_right_then_left():
    rng = random.Random(11)
    for _ in range(50):
        q1 = Quaternion(*random_unit_quaternion(rng))
        q2 = Quaternion(*random_unit_quaternion(rng))
        v = random_unit_vector(rng)
        composed = q1.compose(q2).rotate(v)
        two_step = rotate_by_sandwich(
            (q1.w, q1.x, q1.y, q1.z),
            rotate_by_sandwich((q2.w, q2.x, q2.y, q2.z), v))
        for got, want in zip(composed, two_step):
            assert got == pytest.approx(want, abs=1e-12)


def test_compose_does_not_commute():
    qx = Quaternion.from_axis_angle((1.0, 0.0, 0.0), math.pi / 2)
    qy = Quaternion.from_axis_angle((0.0, 1.0, 0.0), math.pi / 2)
    e3 = (0.0, 0.0, 1.0)
    a = qx.compose(qy).rotate(e3)
    b = qy.compose(qx).rotate(e3)
    assert max(abs(x - y) for x, y in zip(a, b)) > 0.5


def test_to_matrix_identity():
    assert Quaternion.identity().to_matrix() == ((1.0, 0.0, 0.0),
                                                 (0.0, 1.0, 0.0),
                                                 (0.0, 0.0, 1.0))


def test_to_matrix_180_about_z():
    m = Quaternion(0.0, 0.0, 0.0, 1.0).to_matrix()
    expected = ((-1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (0.0, 0.0, 1.0))
    for row, want in zip(m, expected):
        for got, ref in zip(row, want):
            assert got == pytest.approx(ref, abs=1e-15)


def test_to_matrix_90_about_x():
    m = Quaternion(SQ2, SQ2, 0.0, 0.0).to_matrix()
    expected = ((1.0, 0.0, 0.0), (0.0, 0.0, -1.0), (0.0, 1.0, 0.0))
    for row, want in zip(m, expected):
        for got, ref in zip(row, want):
            assert got == pytest.approx(ref, abs=1e-15)


def test_matrix_equals_sandwich_oracle():
    rng = random.Random(99)
    for _ in range(200):
        q = Quaternion(*random_unit_quaternion(rng))
        v = random_unit_vector(rng)
        m = q.to_matrix()
        via_matrix = tuple(m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2]
                           for r in range(3))
        via_oracle = rotate_by_sandwich((q.w, q.x, q.y, q.z), v)
        for got, want in zip(via_matrix, via_oracle):
            assert got == pytest.approx(want, abs=1e-12)


def test_rotate_agrees_with_matrix():
    rng = random.Random(5)
    for _ in range(100):
        q = Quaternion(*random_unit_quaternion(rng))
        v = (rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10))
        m = q.to_matrix()
        via_matrix = tuple(m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2]
                           for r in range(3))
        for got, want in zip(q.rotate(v), via_matrix):
            assert got == pytest.approx(want, abs=1e-11)


def test_matrix_is_orthonormal_with_unit_determinant():
    rng = random.Random(31)
    for _ in range(100):
        m = Quaternion(*random_unit_quaternion(rng)).to_matrix()
        for i in range(3):
            for j in range(3):
                dot = sum(m[k][i] * m[k][j] for k in range(3))
                assert dot == pytest.approx(1.0 if i == j else 0.0, abs=1e-9)
        det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
               - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
               + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        assert det == pytest.approx(1.0, abs=1e-9)


def test_norm_stays_unit_over_long_compose_chains():
    rng = random.Random(2024)
    q = Quaternion.identity()
    for _ in range(10_000):
        step = Quaternion.from_axis_angle(random_unit_vector(rng),
                                          rng.uniform(-0.3, 0.3))
        q = step.compose(q)
        assert abs(q.norm() - 1.0) <= 1e-9


def test_conjugate_inverts_rotation():
    rng = random.Random(8)
    for _ in range(50):
        q = Quaternion(*random_unit_quaternion(rng))
        v = random_unit_vector(rng)
        back = q.conjugate().rotate(q.rotate(v))
        for got, want in zip(back, v):
            assert got == pytest.approx(want, abs=1e-12)


def test_rotation_diff_ignores_sign():
    q = Quaternion.from_axis_angle((0.0, 1.0, 0.0), 1.1)
    negated = Quaternion(-q.w, -q.x, -q.y, -q.z)
    assert q.rotation_diff(negated) == 0.0
    assert q.rotation_diff(q) == 0.0


def test_from_axis_angle_rejects_zero_axis():
    with pytest.raises(ValueError):
        Quaternion.from_axis_angle((0.0, 0.0, 0.0), 1.0)


def test_normalized_rejects_zero_norm():
    with pytest.raises(ValueError):
        Quaternion(0.0, 0.0, 0.0, 0.0).normalized()


@given(st.tuples(*[st.floats(-1.0, 1.0) for _ in range(4)])
       .filter(lambda t: sum(x * x for x in t) > 1e-6))
def test_normalized_quaternion_rotation_preserves_length(components):
    q = Quaternion(*components).normalized()
    rx, ry, rz = q.rotate((1.0, 0.0, 0.0))
    assert math.sqrt(rx * rx + ry * ry + rz * rz) == pytest.approx(1.0, abs=1e-9)
