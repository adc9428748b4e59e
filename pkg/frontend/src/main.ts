/**
 * Browser entry point.  URL parameters pick the session:
 *   ?room=<id>&name=<display name>&server=<host:port>
 *
 * Mouse mapping: drag pans (rotates), wheel pinches (scales), Alt+drag
 * twists about the view axis.  Touch: one finger pans, two fingers
 * pinch and twist.  The Plane toggle redirects the same gestures to the
 * slicing plane.
 */
import { GestureMapper } from "./gestures";
import { Payload } from "./protocol";
import { SocketLike, ViewerSession } from "./session";
import { parseBinaryStl } from "./stl";
import { ViewerMesh, createViewer } from "./viewer";

const params = new URLSearchParams(location.search);
const room = params.get("room") ?? "demo";
const name = params.get("name") ?? "guest";
const server = params.get("server") ?? location.host;

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const statusLine = document.getElementById("status")!;
const memberList = document.getElementById("members")!;
const modeButton = document.getElementById("mode") as HTMLButtonElement;
const saveButton = document.getElementById("save") as HTMLButtonElement;
const restoreButton = document.getElementById("restore") as HTMLButtonElement;
const filePicker = document.getElementById("model-file") as HTMLInputElement;

const session = new ViewerSession({
    server, room, name,
    makeSocket: url => new WebSocket(url) as unknown as SocketLike,
});
const viewer = createViewer(canvas, session.settings);
const mapper = new GestureMapper();
let planeMode = false;

// octahedron stand-in, shown until a model arrives and while a shared
// mesh blob is still being fetched
const PLACEHOLDER: ViewerMesh = {
    vertices: [1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1],
    triangles: [0, 2, 4, 2, 1, 4, 1, 3, 4, 3, 0, 4,
                2, 0, 5, 1, 2, 5, 3, 1, 5, 0, 3, 5],
};
viewer.view.setMesh(PLACEHOLDER);

function meshPending(): boolean {
    const ref = session.replica?.meshRef;
    return !!ref && session.mesh?.meshId !== ref.meshId;
}

function redraw(): void {
    if (session.replica) {
        viewer.view.apply(session.replica.model);
    }
    viewer.render();
}

session.onChange = () => {
    statusLine.textContent = (session.phase === "joined"
        ? `room ${session.room} as ${session.you}`
        : session.phase === "refused"
            ? `refused: ${session.refusedReason}`
            : session.phase)
        + (meshPending() ? " (fetching model)" : "");
    memberList.replaceChildren(
        ...[...(session.replica?.members ?? new Map())].map(([id, who]) => {
            const li = document.createElement("li");
            li.textContent = who ? `${who} (${id})` : id;
            return li;
        }));
    restoreButton.disabled = !session.replica?.saved;
    redraw();
};
session.onServerError = reason => { statusLine.textContent = `server: ${reason}`; };
session.onMesh = mesh => {
    viewer.view.setMesh(mesh);
    redraw();
};

modeButton.onclick = () => {
    planeMode = !planeMode;
    modeButton.textContent = planeMode ? "Steering: plane" : "Steering: model";
};
saveButton.onclick = () => session.saveView();
restoreButton.onclick = () => session.restoreView();

filePicker.onchange = async () => {
    const file = filePicker.files?.[0];
    if (!file) return;
    try {
        const mesh = parseBinaryStl(await file.arrayBuffer());
        session.importMesh(file.name, mesh.vertices, mesh.triangles);
        viewer.view.setMesh(mesh);
        redraw();
    } catch (e) {
        statusLine.textContent = `import failed: ${(e as Error).message}`;
    }
};

function emit(payload: Payload | null): void {
    if (payload) session.send(payload);
}

// -- pointer handling -------------------------------------------------------
// Continuous gestures accumulate from the last *emitted* sample, so
// sub-threshold movement is never silently lost.

interface Tracked { x: number; y: number; }
const pointers = new Map<number, Tracked>();
let panOrigin: Tracked | null = null;
let twistOrigin = 0;           // accumulated Alt-drag twist in px
let pinchBase = 0;             // two-finger distance at last emit
let twistBase = 0;             // two-finger angle at last emit

function currentPlane() {
    return session.replica!.model.plane;
}

canvas.addEventListener("pointerdown", ev => {
    canvas.setPointerCapture(ev.pointerId);
    pointers.set(ev.pointerId, { x: ev.clientX, y: ev.clientY });
    if (pointers.size === 1) {
        panOrigin = { x: ev.clientX, y: ev.clientY };
        twistOrigin = ev.clientX;
    } else if (pointers.size === 2) {
        const [p, q] = [...pointers.values()];
        pinchBase = Math.hypot(q.x - p.x, q.y - p.y);
        twistBase = Math.atan2(q.y - p.y, q.x - p.x);
        panOrigin = null;
    }
});

canvas.addEventListener("pointermove", ev => {
    const tracked = pointers.get(ev.pointerId);
    if (!tracked || !session.replica) return;
    tracked.x = ev.clientX;
    tracked.y = ev.clientY;

    if (pointers.size === 1 && panOrigin) {
        if (ev.altKey) {
            // mouse twist: horizontal drag, 0.01 rad per px
            const angle = (ev.clientX - twistOrigin) * 0.01;
            const payload = planeMode
                ? mapper.planeTwist(currentPlane(), angle)
                : mapper.twist(angle);
            if (payload) {
                emit(payload);
                twistOrigin = ev.clientX;
            }
            return;
        }
        const dx = ev.clientX - panOrigin.x;
        const dy = ev.clientY - panOrigin.y;
        const payload = planeMode
            ? mapper.planePan(currentPlane(), dx, dy)
            : mapper.pan(dx, dy);
        if (payload) {
            emit(payload);
            panOrigin = { x: ev.clientX, y: ev.clientY };
        }
    } else if (pointers.size === 2) {
        const [p, q] = [...pointers.values()];
        const distance = Math.hypot(q.x - p.x, q.y - p.y);
        const angle = Math.atan2(q.y - p.y, q.x - p.x);
        const pinch = planeMode
            ? mapper.planeSlide(currentPlane(), (distance - pinchBase) * 0.01)
            : mapper.pinch(pinchBase, distance);
        if (pinch) {
            emit(pinch);
            pinchBase = distance;
        }
        // screen y is down; negate so counterclockwise fingers spin
        // counterclockwise on screen
        const dTwist = -(angle - twistBase);
        const twist = planeMode
            ? mapper.planeTwist(currentPlane(), dTwist)
            : mapper.twist(dTwist);
        if (twist) {
            emit(twist);
            twistBase = angle;
        }
    }
});

function releasePointer(ev: PointerEvent): void {
    pointers.delete(ev.pointerId);
    panOrigin = null;
    if (pointers.size === 1) {
        const rest = [...pointers.values()][0];
        panOrigin = { x: rest.x, y: rest.y };
    }
}
canvas.addEventListener("pointerup", releasePointer);
canvas.addEventListener("pointercancel", releasePointer);

canvas.addEventListener("wheel", ev => {
    ev.preventDefault();
    if (!session.replica) return;
    if (planeMode) {
        emit(mapper.planeSlide(currentPlane(), -ev.deltaY * 0.002));
    } else {
        const factor = Math.exp(-ev.deltaY * 0.002);
        emit(mapper.pinch(100, 100 * factor));
    }
}, { passive: false });

window.addEventListener("resize", () => { viewer.resize(); redraw(); });
redraw();
