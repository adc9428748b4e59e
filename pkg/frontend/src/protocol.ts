/**
 * Wire codec for session frames: one compact JSON object per frame.
 *
 * Envelopes carry {"seq","sender","ts","type","body"}; control frames
 * are keyed by "control".  Clients send envelopes with seq 0 and let the
 * server assign the total order.  Decoding is strict (unknown types,
 * missing or extra fields, and out-of-range numbers throw DecodeError),
 * with one deliberate leniency: near-unit quaternions and axes are
 * renormalized instead of rejected, because text roundtrips through
 * heterogeneous clients can lose low bits.
 */
import { Plane, Quat, UNIT_TOL, Vec3 } from "./math";

export class DecodeError extends Error {}

export const MAX_SEQ = 2 ** 53 - 1;  // beyond this JSON numbers lose integerness

// -- payloads ---------------------------------------------------------------

export interface RotationDelta { kind: "rot"; dq: Quat; }
export interface ScaleDelta { kind: "scale"; factor: number; }
export interface TwistDelta { kind: "twist"; angle: number; axis: Vec3; }
export interface PlaneUpdate { kind: "plane"; plane: Plane; }
export interface AnchorSet { kind: "anchor"; xyz: Vec3; }
export interface SnapshotSave { kind: "save"; }
export interface SnapshotRestore { kind: "restore"; snapshot: Snapshot; }
export interface ModelImportInline {
    kind: "import"; meshId: string;
    vertices: number[]; triangles: number[];
}
export interface ModelImportRef {
    kind: "import"; meshId: string;
    sha256: string; nVertices: number; nTriangles: number;
}
export type ModelImport = ModelImportInline | ModelImportRef;
export interface Join { kind: "join"; name: string; }
export interface Leave { kind: "leave"; }

export type Payload =
    RotationDelta | ScaleDelta | TwistDelta | PlaneUpdate | AnchorSet |
    SnapshotSave | SnapshotRestore | ModelImport | Join | Leave;

export interface Snapshot { orientation: Quat; scale: number; plane: Plane; }

export interface Envelope {
    seq: number;
    sender: string;
    ts: number;
    payload: Payload;
}

export interface MeshRef {
    meshId: string; sha256: string; nVertices: number; nTriangles: number;
}

export interface ModelStateData {
    orientation: Quat; scale: number; anchor: Vec3; plane: Plane;
}

// -- control frames ---------------------------------------------------------

export interface Welcome {
    kind: "welcome";
    room: string;
    you: string;
    members: [string, string][];
    lastSeq: number;
    state: ModelStateData;
    saved: Snapshot | null;
    mesh: MeshRef | null;
}
export interface Refused { kind: "refused"; reason: string; }
export interface ErrorReply { kind: "error"; reason: string; }
export interface BlobRequest { kind: "blob_get"; meshId: string; }
export interface BlobData {
    kind: "blob"; meshId: string; sha256: string;
    vertices: number[]; triangles: number[];
}
export type ControlFrame = Welcome | Refused | ErrorReply | BlobRequest | BlobData;

export function isControlFrame(f: Envelope | ControlFrame): f is ControlFrame {
    return "kind" in f;
}

// -- strict readers ---------------------------------------------------------

function real(v: unknown, field: string): number {
    if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new DecodeError(`field '${field}': expected a finite number`);
    }
    return v;
}

function integer(v: unknown, field: string, lo = 0, hi = MAX_SEQ): number {
    if (typeof v !== "number" || !Number.isInteger(v)) {
        throw new DecodeError(`field '${field}': expected an integer`);
    }
    if (v < lo || v > hi) {
        throw new DecodeError(`field '${field}': ${v} outside [${lo}, ${hi}]`);
    }
    return v;
}

function str(v: unknown, field: string, allowEmpty = false): string {
    if (typeof v !== "string") {
        throw new DecodeError(`field '${field}': expected a string`);
    }
    if (!v && !allowEmpty) {
        throw new DecodeError(`field '${field}': must be non-empty`);
    }
    return v;
}

function obj(v: unknown, field: string, required: string[],
             optional: string[] = []): Record<string, unknown> {
    if (typeof v !== "object" || v === null || Array.isArray(v)) {
        throw new DecodeError(`field '${field}': expected an object`);
    }
    const rec = v as Record<string, unknown>;
    for (const key of required) {
        if (!(key in rec)) throw new DecodeError(`field '${field}.${key}': missing`);
    }
    for (const key of Object.keys(rec)) {
        if (!required.includes(key) && !optional.includes(key)) {
            throw new DecodeError(`field '${field}.${key}': unexpected`);
        }
    }
    return rec;
}

function reals(v: unknown, field: string, count: number): number[] {
    if (!Array.isArray(v) || v.length !== count) {
        throw new DecodeError(`field '${field}': expected a list of ${count} numbers`);
    }
    return v.map((x, i) => real(x, `${field}[${i}]`));
}

function numberList(v: unknown, field: string): number[] {
    if (!Array.isArray(v)) {
        throw new DecodeError(`field '${field}': expected a list of numbers`);
    }
    return v.map((x, i) => real(x, `${field}[${i}]`));
}

function intList(v: unknown, field: string): number[] {
    if (!Array.isArray(v)) {
        throw new DecodeError(`field '${field}': expected a list of integers`);
    }
    return v.map((x, i) => integer(x, `${field}[${i}]`, 0, 2 ** 31 - 1));
}

function quaternion(v: unknown, field: string): Quat {
    const [w, x, y, z] = reals(v, field, 4);
    const norm = Math.sqrt(w * w + x * x + y * y + z * z);
    if (norm === 0.0 || !Number.isFinite(norm)) {
        throw new DecodeError(`field '${field}': zero-norm quaternion`);
    }
    if (Math.abs(norm - 1.0) > UNIT_TOL) {
        return new Quat(w / norm, x / norm, y / norm, z / norm);
    }
    return new Quat(w, x, y, z);
}

function plane(v: unknown, field: string): Plane {
    const [a, b, c, d] = reals(v, field, 4);
    try {
        return new Plane(a, b, c, d);
    } catch (e) {
        throw new DecodeError(`field '${field}': ${(e as Error).message}`);
    }
}

function unitAxis(v: unknown, field: string): Vec3 {
    const [x, y, z] = reals(v, field, 3);
    const norm = Math.sqrt(x * x + y * y + z * z);
    if (norm === 0.0) throw new DecodeError(`field '${field}': zero-length axis`);
    if (Math.abs(norm - 1.0) > UNIT_TOL) {
        return [x / norm, y / norm, z / norm];
    }
    return [x, y, z];
}

// -- encoding ---------------------------------------------------------------

function finite(v: number, what: string): number {
    if (!Number.isFinite(v)) throw new Error(`${what} must be finite`);
    return v;
}

export function snapshotToObj(s: Snapshot): Record<string, unknown> {
    const q = s.orientation, p = s.plane;
    return { q: [q.w, q.x, q.y, q.z], scale: finite(s.scale, "snapshot scale"),
             abcd: [p.a, p.b, p.c, p.d] };
}

export function snapshotFromObj(v: unknown, field = "snapshot"): Snapshot {
    const body = obj(v, field, ["q", "scale", "abcd"]);
    const scale = real(body.scale, `${field}.scale`);
    if (scale <= 0.0) throw new DecodeError(`field '${field}.scale': must be positive`);
    return { orientation: quaternion(body.q, `${field}.q`), scale,
             plane: plane(body.abcd, `${field}.abcd`) };
}

function encodeBody(p: Payload): [string, Record<string, unknown>] {
    switch (p.kind) {
        case "rot": {
            const q = p.dq;
            if (!q.isUnit()) throw new Error("rotation delta must be unit length");
            return ["rot", { q: [q.w, q.x, q.y, q.z] }];
        }
        case "scale":
            if (!(finite(p.factor, "scale factor") > 0.0)) {
                throw new Error("scale factor must be positive");
            }
            return ["scale", { f: p.factor }];
        case "twist":
            return ["twist", { angle: finite(p.angle, "twist angle"),
                               axis: [...p.axis] }];
        case "plane": {
            const pl = p.plane;
            return ["plane", { abcd: [pl.a, pl.b, pl.c, pl.d] }];
        }
        case "anchor":
            p.xyz.forEach(v => finite(v, "anchor coordinate"));
            return ["anchor", { xyz: [...p.xyz] }];
        case "save":
            return ["save", {}];
        case "restore":
            return ["restore", { snapshot: snapshotToObj(p.snapshot) }];
        case "import":
            if ("vertices" in p) {
                p.vertices.forEach(v => finite(v, "vertex coordinate"));
                return ["import", { mesh_id: p.meshId, vertices: [...p.vertices],
                                    triangles: [...p.triangles] }];
            }
            return ["import", { mesh_id: p.meshId, sha256: p.sha256,
                                nv: p.nVertices, nt: p.nTriangles }];
        case "join":
            return ["join", { name: p.name }];
        case "leave":
            return ["leave", {}];
    }
}

export function encodeEnvelope(e: Envelope): string {
    const [type, body] = encodeBody(e.payload);
    integer(e.seq, "seq");
    integer(e.ts, "ts");
    // key order matches the relay's canonical encoding
    return JSON.stringify({ seq: e.seq, sender: e.sender, ts: e.ts, type, body });
}

/** The one control frame clients send: fetch the current mesh blob. */
export function encodeBlobRequest(meshId: string): string {
    return JSON.stringify({ control: "blob_get", mesh_id: meshId });
}

// -- decoding ---------------------------------------------------------------

function decodeBody(type: string, body: unknown): Payload {
    switch (type) {
        case "rot": {
            const b = obj(body, "body", ["q"]);
            return { kind: "rot", dq: quaternion(b.q, "body.q") };
        }
        case "scale": {
            const b = obj(body, "body", ["f"]);
            const factor = real(b.f, "body.f");
            if (factor <= 0.0) {
                throw new DecodeError("field 'body.f': scale factor must be positive");
            }
            return { kind: "scale", factor };
        }
        case "twist": {
            const b = obj(body, "body", ["angle", "axis"]);
            return { kind: "twist", angle: real(b.angle, "body.angle"),
                     axis: unitAxis(b.axis, "body.axis") };
        }
        case "plane": {
            const b = obj(body, "body", ["abcd"]);
            return { kind: "plane", plane: plane(b.abcd, "body.abcd") };
        }
        case "anchor": {
            const b = obj(body, "body", ["xyz"]);
            const [x, y, z] = reals(b.xyz, "body.xyz", 3);
            return { kind: "anchor", xyz: [x, y, z] };
        }
        case "save":
            obj(body, "body", []);
            return { kind: "save" };
        case "restore": {
            const b = obj(body, "body", ["snapshot"]);
            return { kind: "restore",
                     snapshot: snapshotFromObj(b.snapshot, "body.snapshot") };
        }
        case "import": {
            if (typeof body !== "object" || body === null || Array.isArray(body)) {
                throw new DecodeError("field 'body': expected an object");
            }
            const rec = body as Record<string, unknown>;
            const keys = Object.keys(rec).sort().join(",");
            if (keys === "mesh_id,triangles,vertices") {
                return { kind: "import", meshId: str(rec.mesh_id, "body.mesh_id"),
                         vertices: numberList(rec.vertices, "body.vertices"),
                         triangles: intList(rec.triangles, "body.triangles") };
            }
            if (keys === "mesh_id,nt,nv,sha256") {
                return { kind: "import", meshId: str(rec.mesh_id, "body.mesh_id"),
                         sha256: str(rec.sha256, "body.sha256"),
                         nVertices: integer(rec.nv, "body.nv", 0, 2 ** 31 - 1),
                         nTriangles: integer(rec.nt, "body.nt", 0, 2 ** 31 - 1) };
            }
            throw new DecodeError(
                "field 'body': import needs mesh_id+vertices+triangles or mesh_id+sha256+nv+nt");
        }
        case "join": {
            const b = obj(body, "body", ["name"]);
            return { kind: "join", name: str(b.name, "body.name", true) };
        }
        case "leave":
            obj(body, "body", []);
            return { kind: "leave" };
        default:
            throw new DecodeError(`field 'type': unknown type '${type}'`);
    }
}

function stateFromObj(v: unknown, field: string): ModelStateData {
    const body = obj(v, field, ["q", "scale", "abcd", "anchor"]);
    const scale = real(body.scale, `${field}.scale`);
    if (scale <= 0.0) throw new DecodeError(`field '${field}.scale': must be positive`);
    const [ax, ay, az] = reals(body.anchor, `${field}.anchor`, 3);
    return { orientation: quaternion(body.q, `${field}.q`), scale,
             anchor: [ax, ay, az], plane: plane(body.abcd, `${field}.abcd`) };
}

function meshRefFromObj(v: unknown, field: string): MeshRef {
    const body = obj(v, field, ["mesh_id", "sha256", "nv", "nt"]);
    return { meshId: str(body.mesh_id, `${field}.mesh_id`),
             sha256: str(body.sha256, `${field}.sha256`),
             nVertices: integer(body.nv, `${field}.nv`, 0, 2 ** 31 - 1),
             nTriangles: integer(body.nt, `${field}.nt`, 0, 2 ** 31 - 1) };
}

function decodeControlObj(o: Record<string, unknown>): ControlFrame {
    const kind = str(o.control, "control");
    switch (kind) {
        case "welcome": {
            obj(o, "frame", ["control", "room", "you", "members", "last_seq",
                             "state", "saved", "mesh"]);
            const rawMembers = o.members;
            if (!Array.isArray(rawMembers)) {
                throw new DecodeError("field 'members': expected a list");
            }
            const members: [string, string][] = rawMembers.map((pair, i) => {
                if (!Array.isArray(pair) || pair.length !== 2) {
                    throw new DecodeError(`field 'members[${i}]': expected [peer_id, name]`);
                }
                return [str(pair[0], `members[${i}][0]`),
                        str(pair[1], `members[${i}][1]`, true)];
            });
            return {
                kind: "welcome",
                room: str(o.room, "room"),
                you: str(o.you, "you"),
                members,
                lastSeq: integer(o.last_seq, "last_seq"),
                state: stateFromObj(o.state, "state"),
                saved: o.saved === null ? null : snapshotFromObj(o.saved, "saved"),
                mesh: o.mesh === null ? null : meshRefFromObj(o.mesh, "mesh"),
            };
        }
        case "refused":
            obj(o, "frame", ["control", "reason"]);
            return { kind: "refused", reason: str(o.reason, "reason", true) };
        case "error":
            obj(o, "frame", ["control", "reason"]);
            return { kind: "error", reason: str(o.reason, "reason", true) };
        case "blob_get":
            obj(o, "frame", ["control", "mesh_id"]);
            return { kind: "blob_get", meshId: str(o.mesh_id, "mesh_id") };
        case "blob":
            obj(o, "frame", ["control", "mesh_id", "sha256", "vertices", "triangles"]);
            return { kind: "blob", meshId: str(o.mesh_id, "mesh_id"),
                     sha256: str(o.sha256, "sha256"),
                     vertices: numberList(o.vertices, "vertices"),
                     triangles: intList(o.triangles, "triangles") };
        default:
            throw new DecodeError(`field 'control': unknown control frame '${kind}'`);
    }
}

function parseFrame(text: string): Record<string, unknown> {
    let o: unknown;
    try {
        o = JSON.parse(text);
    } catch (e) {
        throw new DecodeError(`frame is not valid JSON: ${(e as Error).message}`);
    }
    if (typeof o !== "object" || o === null || Array.isArray(o)) {
        throw new DecodeError("frame must be a JSON object");
    }
    return o as Record<string, unknown>;
}

export function decodeFrame(text: string): Envelope | ControlFrame {
    const o = parseFrame(text);
    if ("control" in o) return decodeControlObj(o);
    obj(o, "frame", ["seq", "sender", "ts", "type", "body"]);
    return {
        seq: integer(o.seq, "seq"),
        sender: str(o.sender, "sender"),
        ts: integer(o.ts, "ts"),
        payload: decodeBody(str(o.type, "type"), o.body),
    };
}

/** Normalize an incoming websocket message to frame text. */
export function frameText(data: string | ArrayBuffer | Uint8Array): string {
    if (typeof data === "string") return data;
    const bytes = data instanceof Uint8Array ? data : new Uint8Array(data);
    return new TextDecoder("utf-8", { fatal: false }).decode(bytes);
}
