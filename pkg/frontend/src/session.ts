/**
 * Live connection to a session room.
 *
 * Owns the socket, the local replica, and the render settings.  The
 * replica mutates only when sequenced envelopes arrive from the server
 * (sender-echo rule): sending a gesture changes nothing locally until
 * the echo comes back, so what is rendered is always replicated state.
 *
 * The WebSocket implementation is injected so the same class drives the
 * browser (native WebSocket) and node tooling (the ws package).
 */
import { Envelope, Payload, BlobData, ControlFrame, Welcome,
         decodeFrame, encodeBlobRequest, encodeEnvelope, frameText,
         isControlFrame } from "./protocol";
import { Replica } from "./replica";

export interface RenderSettings {
    /** Luminance factor for inner (back) faces. */
    innerDarkening: number;
    /** "fragment" clips per pixel in the shader; "polygon" drops whole
     * triangles by the centroid rule. */
    clipMode: "fragment" | "polygon";
}

export interface SocketLike {
    send(data: string): void;
    close(): void;
    onopen: ((ev?: unknown) => void) | null;
    onmessage: ((ev: { data: string | ArrayBuffer | Uint8Array }) => void) | null;
    onclose: ((ev?: unknown) => void) | null;
    onerror: ((ev?: unknown) => void) | null;
    binaryType?: string;
}

export type SocketFactory = (url: string) => SocketLike;

export interface MeshData {
    meshId: string;
    vertices: number[];
    triangles: number[];
}

export type SessionPhase = "connecting" | "joined" | "refused" | "closed";

export interface SessionOptions {
    server: string;           // host:port or ws://host:port
    room: string;
    name: string;
    makeSocket: SocketFactory;
}

export class ViewerSession {
    phase: SessionPhase = "connecting";
    replica: Replica | null = null;
    you = "";
    room: string;
    refusedReason = "";
    mesh: MeshData | null = null;
    readonly settings: RenderSettings = { innerDarkening: 0.35, clipMode: "fragment" };

    onChange: (() => void) | null = null;
    onServerError: ((reason: string) => void) | null = null;
    onMesh: ((mesh: MeshData) => void) | null = null;

    private socket: SocketLike;
    private stash: Envelope[] = [];  // envelopes racing ahead of the welcome

    constructor(opts: SessionOptions) {
        this.room = opts.room;
        const base = opts.server.includes("://") ? opts.server : `ws://${opts.server}`;
        const url = `${base.replace(/\/$/, "")}/ws?room=` +
            `${encodeURIComponent(opts.room)}&name=${encodeURIComponent(opts.name)}`;
        this.socket = opts.makeSocket(url);
        if ("binaryType" in this.socket) this.socket.binaryType = "arraybuffer";
        this.socket.onmessage = ev => this.receive(frameText(ev.data));
        this.socket.onclose = () => {
            if (this.phase !== "refused") this.phase = "closed";
            this.changed();
        };
        this.socket.onerror = () => { /* onclose follows and settles phase */ };
    }

    close(): void {
        this.socket.close();
    }

    /** Send one gesture payload; the server assigns seq and echoes. */
    send(payload: Payload): boolean {
        if (this.phase !== "joined") return false;
        this.socket.send(encodeEnvelope(
            { seq: 0, sender: this.you, ts: Date.now(), payload }));
        return true;
    }

    saveView(): boolean {
        return this.send({ kind: "save" });
    }

    /** Re-emit the saved snapshot; false when nothing was ever saved. */
    restoreView(): boolean {
        const saved = this.replica?.saved;
        if (!saved) return false;
        return this.send({ kind: "restore", snapshot: saved });
    }

    importMesh(meshId: string, vertices: number[], triangles: number[]): boolean {
        const ok = this.send({ kind: "import", meshId, vertices, triangles });
        if (ok) {
            // our own copy; the echo's hashed form only updates the ref
            this.mesh = { meshId, vertices, triangles };
            this.onMesh?.(this.mesh);
        }
        return ok;
    }

    private receive(text: string): void {
        const frame = decodeFrame(text);
        if (isControlFrame(frame)) {
            this.control(frame);
        } else if (this.replica === null) {
            this.stash.push(frame);  // join raced ahead of our welcome
        } else {
            const before = this.replica.meshRef;
            this.replica.apply(frame);
            if (this.replica.meshRef !== before) this.maybeFetchMesh();
            this.changed();
        }
    }

    private control(frame: ControlFrame): void {
        switch (frame.kind) {
            case "welcome":
                this.welcome(frame);
                break;
            case "refused":
                this.phase = "refused";
                this.refusedReason = frame.reason;
                this.changed();
                break;
            case "error":
                this.onServerError?.(frame.reason);
                break;
            case "blob":
                this.blob(frame);
                break;
            case "blob_get":
                break;  // server never asks clients for blobs
        }
    }

    private welcome(w: Welcome): void {
        this.replica = Replica.fromWelcome(w);
        this.you = w.you;
        this.phase = "joined";
        for (const envelope of this.stash) this.replica.apply(envelope);
        this.stash = [];
        this.maybeFetchMesh();
        this.changed();
    }

    private blob(frame: BlobData): void {
        this.mesh = { meshId: frame.meshId, vertices: frame.vertices,
                      triangles: frame.triangles };
        this.onMesh?.(this.mesh);
        this.changed();
    }

    private maybeFetchMesh(): void {
        const ref = this.replica?.meshRef;
        if (ref && this.mesh?.meshId !== ref.meshId) {
            this.socket.send(encodeBlobRequest(ref.meshId));
        }
    }

    private changed(): void {
        this.onChange?.();
    }
}
