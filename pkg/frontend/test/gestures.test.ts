import { describe, expect, it } from "vitest";

import { GestureMapper } from "../src/gestures";
import { Plane } from "../src/math";

const DEG = Math.PI / 180;

describe("pinch", () => {
    const m = new GestureMapper();

    it("maps a doubled spread to factor exactly 2.0", () => {
        const p = m.pinch(100, 200);
        expect(p).not.toBeNull();
        expect(p!.kind).toBe("scale");
        if (p!.kind === "scale") expect(p!.factor).toBe(2.0);
    });

    it("suppresses sub-threshold and degenerate spreads", () => {
        expect(m.pinch(100, 101)).toBeNull();
        expect(m.pinch(100, 100)).toBeNull();
        expect(m.pinch(0, 50)).toBeNull();
        expect(m.pinch(100, -5)).toBeNull();
    });
});

describe("pan", () => {
    const m = new GestureMapper();

    it("turns a rightward pan about +y with angle gain*px", () => {
        const p = m.pan(100, 0);
        expect(p).not.toBeNull();
        if (p!.kind !== "rot") throw new Error("expected rot");
        const axis = [0, 1, 0];
        const expected = m.rotationGain * 100;
        // q = (cos(a/2), sin(a/2)*axis)
        expect(p!.dq.w).toBeCloseTo(Math.cos(expected / 2), 12);
        expect(p!.dq.x).toBeCloseTo(0, 12);
        expect(p!.dq.y).toBeCloseTo(Math.sin(expected / 2) * axis[1], 12);
        expect(p!.dq.z).toBeCloseTo(0, 12);
    });

    it("moves the model front toward the pan direction", () => {
        // Screen: x right, y down. The front of the model faces the camera
        // along +z; after a pan the front should lean the way the finger went.
        const cases: [number, number][] = [[80, 0], [-80, 0], [0, 80], [0, -80],
                                           [50, 50], [-30, 70]];
        for (const [dx, dy] of cases) {
            const p = m.pan(dx, dy);
            if (p === null || p.kind !== "rot") throw new Error("expected rot");
            const front = p.dq.rotate([0, 0, 1]);
            const screenX = front[0];
            const screenY = -front[1];  // camera y is screen-up
            const len = Math.hypot(dx, dy);
            expect(screenX * (dx / len) + screenY * (dy / len)).toBeGreaterThan(0);
        }
    });

    it("keeps the rotation axis unit length and in the screen plane", () => {
        const p = m.pan(33, -71);
        if (p === null || p.kind !== "rot") throw new Error("expected rot");
        // Extract the axis back out of the quaternion.
        const s = Math.sqrt(p.dq.x ** 2 + p.dq.y ** 2 + p.dq.z ** 2);
        const axis = [p.dq.x / s, p.dq.y / s, p.dq.z / s];
        expect(Math.hypot(axis[0], axis[1], axis[2])).toBeCloseTo(1.0, 12);
        expect(axis[2]).toBeCloseTo(0.0, 12);
        // Perpendicular to the camera-frame pan vector (dx, -dy, 0).
        expect(axis[0] * 33 + axis[1] * 71).toBeCloseTo(0.0, 10);
    });

    it("suppresses motion under two pixels", () => {
        expect(m.pan(1.0, 1.0)).toBeNull();
        expect(m.pan(0, 0)).toBeNull();
        expect(m.pan(0, 2.5)).not.toBeNull();
    });
});

describe("twist", () => {
    const m = new GestureMapper();

    it("emits about the view axis above half a degree", () => {
        const p = m.twist(0.6 * DEG);
        expect(p).not.toBeNull();
        if (p!.kind !== "twist") throw new Error("expected twist");
        expect(p!.angle).toBe(0.6 * DEG);
        expect(p!.axis).toEqual([0, 0, 1]);
    });

    it("suppresses below the threshold either direction", () => {
        expect(m.twist(0.4 * DEG)).toBeNull();
        expect(m.twist(-0.4 * DEG)).toBeNull();
        expect(m.twist(-0.6 * DEG)).not.toBeNull();
    });
});

describe("plane mode", () => {
    const m = new GestureMapper();
    const current = new Plane(0, 0, 1, 0.5);

    it("pan rotates the full equation", () => {
        const p = m.planePan(current, 120, 0);
        expect(p).not.toBeNull();
        if (p!.kind !== "plane") throw new Error("expected plane");
        const dq = m.pan(120, 0);
        if (dq === null || dq.kind !== "rot") throw new Error("expected rot");
        const expected = current.rotated(dq.dq);
        expect(p!.plane.a).toBeCloseTo(expected.a, 15);
        expect(p!.plane.b).toBeCloseTo(expected.b, 15);
        expect(p!.plane.c).toBeCloseTo(expected.c, 15);
        expect(p!.plane.d).toBeCloseTo(expected.d, 15);
    });

    it("pan below threshold emits nothing", () => {
        expect(m.planePan(current, 1, 0)).toBeNull();
    });

    it("slide shifts d along the normal", () => {
        const p = m.planeSlide(current, 0.25);
        if (p === null || p.kind !== "plane") throw new Error("expected plane");
        expect(p.plane.d).toBe(0.75);
        expect(p.plane.a).toBe(0);
        expect(p.plane.c).toBe(1);
    });

    it("twist spins the plane about the view axis", () => {
        const tilted = new Plane(1, 0, 0, 0.5);
        const p = m.planeTwist(tilted, 90 * DEG);
        if (p === null || p.kind !== "plane") throw new Error("expected plane");
        expect(p.plane.a).toBeCloseTo(0, 12);
        expect(p.plane.b).toBeCloseTo(1, 12);
        expect(p.plane.d).toBeCloseTo(0.5, 12);
    });
});

describe("configuration", () => {
    it("honors a custom rotation gain", () => {
        const slow = new GestureMapper(0.001);
        const p = slow.pan(100, 0);
        if (p === null || p.kind !== "rot") throw new Error("expected rot");
        expect(2 * Math.acos(Math.min(1, Math.abs(p.dq.w)))).toBeCloseTo(0.1, 9);
    });
});
