/**
 * Minimal binary STL reader for the import file picker.  Triangle soup
 * is deduplicated on exact float equality so the shared mesh stays
 * compact on the wire; ASCII STL is out of scope here (the session core
 * accepts it server-side).
 */
import { ViewerMesh } from "./viewer";

const HEADER_BYTES = 80;
const FACET_BYTES = 50;

export function parseBinaryStl(buffer: ArrayBuffer): ViewerMesh {
    if (buffer.byteLength < HEADER_BYTES + 4) {
        throw new Error("not a binary STL: too short");
    }
    const dv = new DataView(buffer);
    const count = dv.getUint32(HEADER_BYTES, true);
    if (buffer.byteLength < HEADER_BYTES + 4 + count * FACET_BYTES) {
        throw new Error(`truncated binary STL: ${count} facets declared`);
    }
    const vertices: number[] = [];
    const triangles: number[] = [];
    const seen = new Map<string, number>();
    for (let f = 0; f < count; f++) {
        const base = HEADER_BYTES + 4 + f * FACET_BYTES + 12;  // skip facet normal
        for (let corner = 0; corner < 3; corner++) {
            const x = dv.getFloat32(base + corner * 12, true);
            const y = dv.getFloat32(base + corner * 12 + 4, true);
            const z = dv.getFloat32(base + corner * 12 + 8, true);
            if (!Number.isFinite(x) || !Number.isFinite(y) || !Number.isFinite(z)) {
                throw new Error(`non-finite vertex in facet ${f}`);
            }
            const key = `${x},${y},${z}`;
            let index = seen.get(key);
            if (index === undefined) {
                index = vertices.length / 3;
                seen.set(key, index);
                vertices.push(x, y, z);
            }
            triangles.push(index);
        }
    }
    return { vertices, triangles };
}
