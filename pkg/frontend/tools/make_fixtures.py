"""Regenerate the cross-implementation test fixtures in test/fixtures/.

clip_cases.json pins the geometry core's centroid-rule visibility masks
for the unit cube under a batch of planes; the viewer's exported mask
must match them exactly.  wire_frames.json pins frames encoded by the
session codec so the viewer's decoder is checked against real server
bytes, not its own round-trip.

Run from the frontend directory: python3 tools/make_fixtures.py
"""
from __future__ import annotations

import json
import pathlib
import random

from sliceroom.geometry import (
    Plane,
    Quaternion,
    RotationDelta,
    RULE_CENTROID,
    ScaleDelta,
    TriangleMesh,
    TwistDelta,
    classify_triangles,
)
from sliceroom.protocol import (
    AnchorSet,
    Envelope,
    ModelImport,
    PlaneUpdate,
    Snapshot,
    SnapshotRestore,
    SnapshotSave,
    encode_envelope,
)

OUT_DIR = pathlib.Path(__file__).resolve().parent.parent / "test" / "fixtures"

CUBE_VERTICES = [
    (0.0, 0.0, 0.0), (0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (0.0, 1.0, 1.0),
    (1.0, 0.0, 0.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0), (1.0, 1.0, 1.0),
]
CUBE_TRIANGLES = [
    (0, 1, 3), (0, 3, 2), (4, 6, 7), (4, 7, 5),
    (0, 4, 5), (0, 5, 1), (2, 3, 7), (2, 7, 6),
    (0, 2, 6), (0, 6, 4), (1, 5, 7), (1, 7, 3),
]


def clip_cases() -> dict:
    mesh = TriangleMesh.from_lists(CUBE_VERTICES, CUBE_TRIANGLES)
    planes = [
        # axis-aligned, including cuts exactly through face centroids so
        # the >= 0 boundary convention is part of the fixture
        (1.0, 0.0, 0.0, 0.0),
        (1.0, 0.0, 0.0, 0.5),
        (0.0, 0.0, 1.0, 1.0),
        (0.0, -1.0, 0.0, -0.25),
        (0.0, 0.0, 1.0, -5.0),
        (0.0, 0.0, 1.0, 5.0),
    ]
    rng = random.Random(90210)
    for _ in range(24):
        x = rng.gauss(0.0, 1.0)
        y = rng.gauss(0.0, 1.0)
        z = rng.gauss(0.0, 1.0)
        n = (x * x + y * y + z * z) ** 0.5
        plane = Plane(x / n, y / n, z / n, rng.uniform(-1.5, 1.5))
        planes.append((plane.a, plane.b, plane.c, plane.d))
    cases = []
    for abcd in planes:
        mask = classify_triangles(mesh, Plane(*abcd), RULE_CENTROID)
        cases.append({"abcd": list(abcd), "mask": [bool(v) for v in mask]})
    return {
        "vertices": [c for v in CUBE_VERTICES for c in v],
        "triangles": [i for t in CUBE_TRIANGLES for i in t],
        "cases": cases,
    }


def wire_frames() -> list:
    rng = random.Random(4242)
    q = Quaternion(*(rng.gauss(0.0, 1.0) for _ in range(4))).normalized()
    snapshot = Snapshot(q, 3.25, Plane(0.0, 1.0, 0.0, 0.125))
    payloads = [
        RotationDelta(q),
        ScaleDelta(1.0 / 3.0),
        TwistDelta(0.7853981633974483, (0.0, 0.0, 1.0)),
        PlaneUpdate(Plane(0.6, 0.0, 0.8, -2.5)),
        AnchorSet((0.1, -0.2, 1e-300)),
        SnapshotSave(),
        SnapshotRestore(snapshot),
        ModelImport(mesh_id="probe", vertices=(0.0, 0.0, 0.0, 1.0, 0.0, 0.0,
                                               0.0, 1.0, 0.0),
                    triangles=(0, 1, 2)),
        ModelImport(mesh_id="probe", sha256="ab" * 32, n_vertices=3,
                    n_triangles=1),
    ]
    frames = []
    for seq, payload in enumerate(payloads, start=11):
        data = encode_envelope(Envelope(seq, f"p{seq % 4 + 1}", 1700000000000 + seq,
                                        payload))
        frames.append({"frame": data.decode("utf-8"), "type": type(payload).__name__})
    return frames


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    (OUT_DIR / "clip_cases.json").write_text(
        json.dumps(clip_cases(), separators=(",", ":"), allow_nan=False) + "\n")
    (OUT_DIR / "wire_frames.json").write_text(
        json.dumps(wire_frames(), indent=1, allow_nan=False) + "\n")
    print(f"fixtures written to {OUT_DIR}")


if __name__ == "__main__":
    main()
