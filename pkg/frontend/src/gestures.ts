/**
 * Maps raw pointer gestures to delta payloads.
 *
 * Pinch scales by the finger-distance ratio.  A pan of (dx, dy) pixels
 * rotates about the in-plane axis perpendicular to the pan direction,
 * angle gain * |pan|, so the model surface follows the finger.  A
 * two-finger twist rotates about the camera view axis.  In plane mode
 * the same motions steer the slicing plane instead, always emitting the
 * full transformed equation.
 *
 * Axis convention for diagonal pans: with screen x right and y down,
 * the rotation axis in the fixed camera frame is normalize(dy, dx, 0).
 * Pan right -> +y axis, pan up -> -x axis; both move the front of the
 * model in the pan direction.
 */
import { Plane, Quat, Vec3 } from "./math";
import { Payload } from "./protocol";

export const DEFAULT_ROTATION_GAIN = 0.01;       // rad per pixel
export const PAN_THRESHOLD_PX = 2.0;
export const TWIST_THRESHOLD_RAD = 0.5 * Math.PI / 180.0;
export const PINCH_THRESHOLD_PX = 2.0;

/** The camera looks down -z; +z points out of the screen at the viewer. */
export const VIEW_AXIS: Vec3 = [0.0, 0.0, 1.0];

export class GestureMapper {
    constructor(public rotationGain: number = DEFAULT_ROTATION_GAIN) {}

    /** Pinch from one finger distance to another; null below threshold. */
    pinch(fromDistancePx: number, toDistancePx: number): Payload | null {
        if (!(fromDistancePx > 0.0) || !(toDistancePx > 0.0)) return null;
        if (Math.abs(toDistancePx - fromDistancePx) < PINCH_THRESHOLD_PX) return null;
        return { kind: "scale", factor: toDistancePx / fromDistancePx };
    }

    /** Pan in screen pixels (y down); null for sub-threshold jitter. */
    pan(dxPx: number, dyPx: number): Payload | null {
        const length = Math.sqrt(dxPx * dxPx + dyPx * dyPx);
        if (length < PAN_THRESHOLD_PX) return null;
        const axis: Vec3 = [dyPx / length, dxPx / length, 0.0];
        return { kind: "rot",
                 dq: Quat.fromAxisAngle(axis, this.rotationGain * length) };
    }

    /** Two-finger twist angle in radians; null below threshold. */
    twist(angleRad: number): Payload | null {
        if (Math.abs(angleRad) < TWIST_THRESHOLD_RAD) return null;
        return { kind: "twist", angle: angleRad, axis: VIEW_AXIS };
    }

    /** Plane-mode pan: rotate the plane, emit the full equation. */
    planePan(current: Plane, dxPx: number, dyPx: number): Payload | null {
        const length = Math.sqrt(dxPx * dxPx + dyPx * dyPx);
        if (length < PAN_THRESHOLD_PX) return null;
        const axis: Vec3 = [dyPx / length, dxPx / length, 0.0];
        const dq = Quat.fromAxisAngle(axis, this.rotationGain * length);
        return { kind: "plane", plane: current.rotated(dq) };
    }

    /** Plane-mode pinch: slide the plane along its normal. */
    planeSlide(current: Plane, distance: number): Payload | null {
        if (!Number.isFinite(distance) || distance === 0.0) return null;
        return { kind: "plane", plane: current.offset(distance) };
    }

    /** Plane-mode twist: spin the plane about the view axis. */
    planeTwist(current: Plane, angleRad: number): Payload | null {
        if (Math.abs(angleRad) < TWIST_THRESHOLD_RAD) return null;
        const dq = Quat.fromAxisAngle(VIEW_AXIS, angleRad);
        return { kind: "plane", plane: current.rotated(dq) };
    }
}
