"""Replicated model pose and the per-gesture delta vocabulary.

Every gesture a client can make maps to one small delta value; peers
converge because every replica applies the same deltas in the same order
through :func:`apply_delta`, which is a pure function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .plane import Plane
from .quaternion import Quaternion, Vec3, UNIT_TOL

DEFAULT_SCALE_MIN = 0.05
DEFAULT_SCALE_MAX = 20.0

# d far below any plausible model keeps a fresh session fully visible.
DEFAULT_PLANE = Plane(0.0, 0.0, 1.0, -1000.0)


def _require_unit_quat(dq: Quaternion) -> None:
    if not dq.is_unit(UNIT_TOL):
        raise ValueError(f"delta quaternion must be unit length, norm={dq.norm()!r}")


@dataclass(frozen=True, slots=True)
class RotationDelta:
    """World-frame rotation delta (screen-space pan gesture)."""
    dq: Quaternion

    def __post_init__(self) -> None:
        _require_unit_quat(self.dq)


@dataclass(frozen=True, slots=True)
class ScaleDelta:
    """Uniform scale delta (pinch gesture); factor multiplies current scale."""
    factor: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.factor) and self.factor > 0.0):
            raise ValueError(f"scale factor must be finite and > 0, got {self.factor!r}")


@dataclass(frozen=True, slots=True)
class TwistDelta:
    """Rotation about an explicit axis (two-finger twist about the view axis)."""
    angle: float
    axis: Vec3

    def __post_init__(self) -> None:
        ax, ay, az = self.axis
        n = math.sqrt(ax * ax + ay * ay + az * az)
        if abs(n - 1.0) > UNIT_TOL:
            raise ValueError(f"twist axis must be unit length, norm={n!r}")
        if not math.isfinite(self.angle):
            raise ValueError("twist angle must be finite")


@dataclass(frozen=True, slots=True)
class PlaneRotateDelta:
    """Rotation delta applied to the slicing plane."""
    dq: Quaternion

    def __post_init__(self) -> None:
        _require_unit_quat(self.dq)


@dataclass(frozen=True, slots=True)
class PlaneOffsetDelta:
    """Translation of the slicing plane along its own normal."""
    dd: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.dd):
            raise ValueError("plane offset must be finite")


GestureDelta = RotationDelta | ScaleDelta | TwistDelta | PlaneRotateDelta | PlaneOffsetDelta


@dataclass(frozen=True, slots=True)
class ModelState:
    """Shared session state: pose, zoom, world anchor, and slicing plane."""
    orientation: Quaternion = Quaternion.identity()
    scale: float = 1.0
    anchor: Vec3 = (0.0, 0.0, 0.0)
    plane: Plane = DEFAULT_PLANE


def apply_delta(state: ModelState, delta: GestureDelta,
                scale_min: float = DEFAULT_SCALE_MIN,
                scale_max: float = DEFAULT_SCALE_MAX) -> ModelState:
    """Apply one gesture delta; pure, the input state is never modified.

    Model rotations pre-multiply in the world frame; scale is clamped to
    [scale_min, scale_max]; plane deltas touch only the plane.  The plane is
    deliberately independent of model scale: slicing lives in model space
    before zoom, so a pinch never moves the cut.
    """
    if isinstance(delta, RotationDelta):
        return replace(state, orientation=delta.dq.compose(state.orientation))
    if isinstance(delta, ScaleDelta):
        clamped = min(max(delta.factor * state.scale, scale_min), scale_max)
        return replace(state, scale=clamped)
    if isinstance(delta, TwistDelta):
        dq = Quaternion.from_axis_angle(delta.axis, delta.angle)
        return replace(state, orientation=dq.compose(state.orientation))
    if isinstance(delta, PlaneRotateDelta):
        return replace(state, plane=state.plane.rotated(delta.dq))
    if isinstance(delta, PlaneOffsetDelta):
        return replace(state, plane=state.plane.offset(delta.dd))
    raise TypeError(f"not a gesture delta: {delta!r}")
