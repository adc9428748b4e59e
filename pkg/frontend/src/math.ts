/**
 * Quaternion and plane math, mirroring the session core's conventions:
 * Hamilton product, scalar-first (w, x, y, z), rotation as the sandwich
 * q v q*, compose(a, b) = "apply b, then a".  q and -q are the same
 * rotation; compare through rotationDiff, never componentwise.
 *
 * classifyCentroid keeps the exact expression order of the core's
 * kernels so the boolean masks match bit for bit across languages.
 */

export const UNIT_TOL = 1e-9;

export type Vec3 = [number, number, number];
export type Mat3 = [Vec3, Vec3, Vec3];

export class Quat {
    constructor(
        public readonly w: number,
        public readonly x: number,
        public readonly y: number,
        public readonly z: number,
    ) {}

    static identity(): Quat {
        return new Quat(1.0, 0.0, 0.0, 0.0);
    }

    static fromAxisAngle(axis: Vec3, angle: number): Quat {
        const [ax, ay, az] = axis;
        const n = Math.sqrt(ax * ax + ay * ay + az * az);
        if (!(n > 0.0) || !Number.isFinite(n)) {
            throw new Error("rotation axis must be a finite nonzero vector");
        }
        const half = 0.5 * angle;
        const s = Math.sin(half) / n;
        return new Quat(Math.cos(half), ax * s, ay * s, az * s).normalized();
    }

    norm(): number {
        return Math.sqrt(this.w * this.w + this.x * this.x
                         + this.y * this.y + this.z * this.z);
    }

    isUnit(tol: number = UNIT_TOL): boolean {
        return Math.abs(this.norm() - 1.0) <= tol;
    }

    normalized(): Quat {
        const n = this.norm();
        if (!(n > 0.0) || !Number.isFinite(n)) {
            throw new Error("cannot normalize a zero or non-finite quaternion");
        }
        return new Quat(this.w / n, this.x / n, this.y / n, this.z / n);
    }

    conjugate(): Quat {
        return new Quat(this.w, -this.x, -this.y, -this.z);
    }

    /** Hamilton product this ⊗ other, renormalized; applies `other` first. */
    compose(other: Quat): Quat {
        const w1 = this.w, x1 = this.x, y1 = this.y, z1 = this.z;
        const w2 = other.w, x2 = other.x, y2 = other.y, z2 = other.z;
        return new Quat(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 + y1 * w2 + z1 * x2 - x1 * z2,
            w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
        ).normalized();
    }

    rotate(v: Vec3): Vec3 {
        const [vx, vy, vz] = v;
        const w = this.w, x = this.x, y = this.y, z = this.z;
        const aw = -x * vx - y * vy - z * vz;
        const ax = w * vx + y * vz - z * vy;
        const ay = w * vy + z * vx - x * vz;
        const az = w * vz + x * vy - y * vx;
        return [
            -aw * x + ax * w - ay * z + az * y,
            -aw * y + ay * w - az * x + ax * z,
            -aw * z + az * w - ax * y + ay * x,
        ];
    }

    toMatrix(): Mat3 {
        const w = this.w, x = this.x, y = this.y, z = this.z;
        const xx = x * x, yy = y * y, zz = z * z;
        const xy = x * y, xz = x * z, yz = y * z;
        const wx = w * x, wy = w * y, wz = w * z;
        return [
            [1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)],
            [2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)],
            [2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)],
        ];
    }

    /** Max componentwise distance to `other`, minimized over the q/-q sign. */
    rotationDiff(other: Quat): number {
        const direct = Math.max(
            Math.abs(this.w - other.w), Math.abs(this.x - other.x),
            Math.abs(this.y - other.y), Math.abs(this.z - other.z));
        const flipped = Math.max(
            Math.abs(this.w + other.w), Math.abs(this.x + other.x),
            Math.abs(this.y + other.y), Math.abs(this.z + other.z));
        return Math.min(direct, flipped);
    }
}

/** Plane a·x + b·y + c·z = d with a unit normal.
 *
 * Near-unit normals are renormalized only when they miss unit length by
 * more than UNIT_TOL, so wire values that are already normalized keep
 * their exact bits.
 */
export class Plane {
    readonly a: number;
    readonly b: number;
    readonly c: number;
    readonly d: number;

    constructor(a: number, b: number, c: number, d: number) {
        const n = Math.sqrt(a * a + b * b + c * c);
        if (!(n > 0.0) || !Number.isFinite(n)) {
            throw new Error("plane normal must be finite and nonzero");
        }
        if (!Number.isFinite(d)) {
            throw new Error("plane offset must be finite");
        }
        if (Math.abs(n - 1.0) > UNIT_TOL) {
            a /= n; b /= n; c /= n; d /= n;
        }
        this.a = a; this.b = b; this.c = c; this.d = d;
    }

    normal(): Vec3 {
        return [this.a, this.b, this.c];
    }

    signedDistance(p: Vec3): number {
        return this.a * p[0] + this.b * p[1] + this.c * p[2] - this.d;
    }

    offset(dd: number): Plane {
        return new Plane(this.a, this.b, this.c, this.d + dd);
    }

    /** The plane under rotation q, via the diagonal-augmented 4x4. */
    rotated(q: Quat): Plane {
        const m3 = q.toMatrix();
        const m4: number[][] = [
            [m3[0][0], m3[0][1], m3[0][2], 0.0],
            [m3[1][0], m3[1][1], m3[1][2], 0.0],
            [m3[2][0], m3[2][1], m3[2][2], 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        const vec = [this.a, this.b, this.c, this.d];
        const out = m4.map(
            row => row[0] * vec[0] + row[1] * vec[1] + row[2] * vec[2] + row[3] * vec[3]);
        return new Plane(out[0], out[1], out[2], out[3]);
    }
}

export type ClipRule = "centroid" | "any_vertex";

/**
 * Per-triangle visibility under the centroid rule: visible iff the
 * centroid's signed distance to the plane is >= 0.  Expression order is
 * a compatibility contract with the core kernels; do not refactor the
 * arithmetic.
 */
export function classifyCentroid(
    vertices: ArrayLike<number>, triangles: ArrayLike<number>, plane: Plane,
): boolean[] {
    const { a, b, c, d } = plane;
    const out: boolean[] = new Array(Math.floor(triangles.length / 3));
    for (let t = 0; t < out.length; t++) {
        const i0 = 3 * triangles[3 * t], i1 = 3 * triangles[3 * t + 1],
              i2 = 3 * triangles[3 * t + 2];
        const cx = (vertices[i0] + vertices[i1] + vertices[i2]) / 3.0;
        const cy = (vertices[i0 + 1] + vertices[i1 + 1] + vertices[i2 + 1]) / 3.0;
        const cz = (vertices[i0 + 2] + vertices[i1 + 2] + vertices[i2 + 2]) / 3.0;
        out[t] = cx * a + cy * b + cz * c - d >= 0.0;
    }
    return out;
}

/** Any-vertex rule: visible iff any corner has signed distance >= 0. */
export function classifyAnyVertex(
    vertices: ArrayLike<number>, triangles: ArrayLike<number>, plane: Plane,
): boolean[] {
    const { a, b, c, d } = plane;
    const out: boolean[] = new Array(Math.floor(triangles.length / 3));
    for (let t = 0; t < out.length; t++) {
        let visible = false;
        for (let k = 0; k < 3; k++) {
            const i = 3 * triangles[3 * t + k];
            const dist = vertices[i] * a + vertices[i + 1] * b + vertices[i + 2] * c - d;
            if (dist >= 0.0) { visible = true; break; }
        }
        out[t] = visible;
    }
    return out;
}

export function clamp(v: number, lo: number, hi: number): number {
    return Math.min(Math.max(v, lo), hi);
}
