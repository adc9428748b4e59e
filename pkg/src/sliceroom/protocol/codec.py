"""Canonical text encoding of wire frames.

One frame = one UTF-8 JSON object, compact separators, fields in a fixed
order.  Floats are written with Python's shortest-roundtrip repr (at most
17 significant digits), so decode(encode(e)) returns the identical bits
and two peers encoding the same value produce the same bytes.  NaN and
infinity are rejected in both directions.

Envelopes carry `{"seq","sender","ts","type","body"}`; control frames are
distinguished by a `"control"` key instead.  Decoding is strict: unknown
types, missing or extra fields, and non-finite numbers raise
:class:`DecodeError` naming the offending field.  The one deliberate
leniency is near-unit quaternions and plane normals, which are
renormalized rather than rejected because text roundtrips through
heterogeneous clients can lose low bits.
"""
from __future__ import annotations

import hashlib
import json
import math

from ..geometry import (
    ModelState,
    Plane,
    Quaternion,
    RotationDelta,
    ScaleDelta,
    TwistDelta,
    UNIT_TOL,
)
from .messages import (
    AnchorSet,
    BlobData,
    BlobRequest,
    ControlFrame,
    Envelope,
    ErrorReply,
    Join,
    Leave,
    MeshRef,
    ModelImport,
    Payload,
    PlaneUpdate,
    Refused,
    Snapshot,
    SnapshotRestore,
    SnapshotSave,
    Welcome,
)

__all__ = [
    "DecodeError", "decode_control", "decode_envelope", "decode_frame",
    "encode_control", "encode_envelope", "encode_full_transform",
    "mesh_blob_bytes", "mesh_sha256", "snapshot_from_obj", "snapshot_to_obj",
]

MAX_SEQ = 2**64 - 1


class DecodeError(ValueError):
    """Malformed frame; the message names the field at fault."""


def _dumps(obj) -> bytes:
    # allow_nan=False turns non-finite floats into encode-time errors
    return json.dumps(obj, separators=(",", ":"), allow_nan=False).encode("utf-8")


def _reject_constant(token: str):
    raise DecodeError(f"non-finite number {token!r}")


def _loads(data: bytes | str) -> dict:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError(f"frame is not valid UTF-8: {exc.reason}") from None
    try:
        obj = json.loads(data, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"frame is not valid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise DecodeError("frame must be a JSON object")
    return obj


# ---------------------------------------------------------------------------
# strict field readers

def _real(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DecodeError(f"field '{field}': expected a number")
    value = float(value)
    if not math.isfinite(value):
        raise DecodeError(f"field '{field}': non-finite number")
    return value


def _integer(value, field: str, lo: int = 0, hi: int = MAX_SEQ) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DecodeError(f"field '{field}': expected an integer")
    if value < lo or value > hi:
        raise DecodeError(f"field '{field}': {value} outside [{lo}, {hi}]")
    return value


def _string(value, field: str, *, allow_empty: bool = False) -> str:
    if not isinstance(value, str):
        raise DecodeError(f"field '{field}': expected a string")
    if not value and not allow_empty:
        raise DecodeError(f"field '{field}': must be non-empty")
    return value


def _reals(value, field: str, count: int) -> tuple[float, ...]:
    if not isinstance(value, list) or len(value) != count:
        raise DecodeError(f"field '{field}': expected a list of {count} numbers")
    return tuple(_real(v, f"{field}[{i}]") for i, v in enumerate(value))


def _obj(value, field: str, required: tuple[str, ...],
         optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(value, dict):
        raise DecodeError(f"field '{field}': expected an object")
    for key in required:
        if key not in value:
            raise DecodeError(f"field '{field}.{key}': missing")
    for key in value:
        if key not in required and key not in optional:
            raise DecodeError(f"field '{field}.{key}': unexpected")
    return value


def _quaternion(value, field: str) -> Quaternion:
    w, x, y, z = _reals(value, field, 4)
    norm = math.sqrt(w * w + x * x + y * y + z * z)
    if norm == 0.0 or not math.isfinite(norm):
        raise DecodeError(f"field '{field}': zero-norm quaternion")
    if abs(norm - 1.0) > UNIT_TOL:
        # renormalize, never reject: text roundtrips lose low bits
        w, x, y, z = w / norm, x / norm, y / norm, z / norm
    return Quaternion(w, x, y, z)


def _plane(value, field: str) -> Plane:
    a, b, c, d = _reals(value, field, 4)
    try:
        return Plane(a, b, c, d)
    except ValueError as exc:
        raise DecodeError(f"field '{field}': {exc}") from None


def _unit_axis(value, field: str) -> tuple[float, float, float]:
    x, y, z = _reals(value, field, 3)
    norm = math.sqrt(x * x + y * y + z * z)
    if norm == 0.0:
        raise DecodeError(f"field '{field}': zero-length axis")
    if abs(norm - 1.0) > UNIT_TOL:
        x, y, z = x / norm, y / norm, z / norm
    return (x, y, z)


# ---------------------------------------------------------------------------
# payload bodies

def snapshot_to_obj(snap: Snapshot) -> dict:
    q = snap.orientation
    p = snap.plane
    return {"q": [q.w, q.x, q.y, q.z], "scale": snap.scale,
            "abcd": [p.a, p.b, p.c, p.d]}


def snapshot_from_obj(value, field: str = "snapshot") -> Snapshot:
    body = _obj(value, field, ("q", "scale", "abcd"))
    scale = _real(body["scale"], f"{field}.scale")
    if scale <= 0.0:
        raise DecodeError(f"field '{field}.scale': must be positive")
    return Snapshot(_quaternion(body["q"], f"{field}.q"), scale,
                    _plane(body["abcd"], f"{field}.abcd"))


def _encode_body(payload: Payload) -> tuple[str, dict]:
    if isinstance(payload, RotationDelta):
        q = payload.dq
        return "rot", {"q": [q.w, q.x, q.y, q.z]}
    if isinstance(payload, ScaleDelta):
        return "scale", {"f": payload.factor}
    if isinstance(payload, TwistDelta):
        return "twist", {"angle": payload.angle, "axis": list(payload.axis)}
    if isinstance(payload, PlaneUpdate):
        p = payload.plane
        return "plane", {"abcd": [p.a, p.b, p.c, p.d]}
    if isinstance(payload, AnchorSet):
        return "anchor", {"xyz": list(payload.translation)}
    if isinstance(payload, SnapshotSave):
        return "save", {}
    if isinstance(payload, SnapshotRestore):
        return "restore", {"snapshot": snapshot_to_obj(payload.snapshot)}
    if isinstance(payload, ModelImport):
        if payload.is_inline:
            return "import", {"mesh_id": payload.mesh_id,
                              "vertices": list(payload.vertices),
                              "triangles": list(payload.triangles)}
        return "import", {"mesh_id": payload.mesh_id, "sha256": payload.sha256,
                          "nv": payload.n_vertices, "nt": payload.n_triangles}
    if isinstance(payload, Join):
        return "join", {"name": payload.name}
    if isinstance(payload, Leave):
        return "leave", {}
    raise TypeError(f"not a payload: {payload!r}")


def _decode_rot(body: dict) -> Payload:
    _obj(body, "body", ("q",))
    return RotationDelta(_quaternion(body["q"], "body.q"))


def _decode_scale(body: dict) -> Payload:
    _obj(body, "body", ("f",))
    factor = _real(body["f"], "body.f")
    if factor <= 0.0:
        raise DecodeError("field 'body.f': scale factor must be positive")
    return ScaleDelta(factor)


def _decode_twist(body: dict) -> Payload:
    _obj(body, "body", ("angle", "axis"))
    return TwistDelta(_real(body["angle"], "body.angle"),
                      _unit_axis(body["axis"], "body.axis"))


def _decode_plane(body: dict) -> Payload:
    _obj(body, "body", ("abcd",))
    return PlaneUpdate(_plane(body["abcd"], "body.abcd"))


def _decode_anchor(body: dict) -> Payload:
    _obj(body, "body", ("xyz",))
    return AnchorSet(_reals(body["xyz"], "body.xyz", 3))


def _decode_save(body: dict) -> Payload:
    _obj(body, "body", ())
    return SnapshotSave()


def _decode_restore(body: dict) -> Payload:
    _obj(body, "body", ("snapshot",))
    return SnapshotRestore(snapshot_from_obj(body["snapshot"], "body.snapshot"))


def _flat_reals(value, field: str) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise DecodeError(f"field '{field}': expected a list of numbers")
    return tuple(_real(v, f"{field}[{i}]") for i, v in enumerate(value))


def _flat_ints(value, field: str) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise DecodeError(f"field '{field}': expected a list of integers")
    return tuple(_integer(v, f"{field}[{i}]", hi=2**31 - 1) for i, v in enumerate(value))


def _decode_import(body: dict) -> Payload:
    if not isinstance(body, dict):
        raise DecodeError("field 'body': expected an object")
    keys = set(body)
    try:
        if keys == {"mesh_id", "vertices", "triangles"}:
            return ModelImport(
                mesh_id=_string(body["mesh_id"], "body.mesh_id"),
                vertices=_flat_reals(body["vertices"], "body.vertices"),
                triangles=_flat_ints(body["triangles"], "body.triangles"))
        if keys == {"mesh_id", "sha256", "nv", "nt"}:
            return ModelImport(
                mesh_id=_string(body["mesh_id"], "body.mesh_id"),
                sha256=_string(body["sha256"], "body.sha256"),
                n_vertices=_integer(body["nv"], "body.nv", hi=2**31 - 1),
                n_triangles=_integer(body["nt"], "body.nt", hi=2**31 - 1))
    except ValueError as exc:
        if isinstance(exc, DecodeError):
            raise
        raise DecodeError(f"field 'body': {exc}") from None
    raise DecodeError(
        "field 'body': import needs mesh_id+vertices+triangles or mesh_id+sha256+nv+nt")


def _decode_join(body: dict) -> Payload:
    _obj(body, "body", ("name",))
    return Join(_string(body["name"], "body.name", allow_empty=True))


def _decode_leave(body: dict) -> Payload:
    _obj(body, "body", ())
    return Leave()


_BODY_DECODERS = {
    "rot": _decode_rot,
    "scale": _decode_scale,
    "twist": _decode_twist,
    "plane": _decode_plane,
    "anchor": _decode_anchor,
    "save": _decode_save,
    "restore": _decode_restore,
    "import": _decode_import,
    "join": _decode_join,
    "leave": _decode_leave,
}


# ---------------------------------------------------------------------------
# envelopes

def encode_envelope(envelope: Envelope) -> bytes:
    type_tag, body = _encode_body(envelope.payload)
    return _dumps({"seq": envelope.seq, "sender": envelope.sender_id,
                   "ts": envelope.sent_at, "type": type_tag, "body": body})


def _decode_envelope_obj(obj: dict) -> Envelope:
    _obj(obj, "frame", ("seq", "sender", "ts", "type", "body"))
    type_tag = _string(obj["type"], "type")
    decoder = _BODY_DECODERS.get(type_tag)
    if decoder is None:
        raise DecodeError(f"field 'type': unknown type {type_tag!r}")
    return Envelope(
        seq=_integer(obj["seq"], "seq"),
        sender_id=_string(obj["sender"], "sender"),
        sent_at=_integer(obj["ts"], "ts"),
        payload=decoder(obj["body"]))


def decode_envelope(data: bytes | str) -> Envelope:
    obj = _loads(data)
    if "control" in obj:
        raise DecodeError("frame is a control frame, not an envelope")
    return _decode_envelope_obj(obj)


# ---------------------------------------------------------------------------
# control frames

def _state_to_obj(state: ModelState) -> dict:
    q = state.orientation
    p = state.plane
    return {"q": [q.w, q.x, q.y, q.z], "scale": state.scale,
            "abcd": [p.a, p.b, p.c, p.d], "anchor": list(state.anchor)}


def _state_from_obj(value, field: str) -> ModelState:
    body = _obj(value, field, ("q", "scale", "abcd", "anchor"))
    scale = _real(body["scale"], f"{field}.scale")
    if scale <= 0.0:
        raise DecodeError(f"field '{field}.scale': must be positive")
    return ModelState(
        orientation=_quaternion(body["q"], f"{field}.q"),
        scale=scale,
        anchor=_reals(body["anchor"], f"{field}.anchor", 3),
        plane=_plane(body["abcd"], f"{field}.abcd"))


def _mesh_ref_to_obj(ref: MeshRef) -> dict:
    return {"mesh_id": ref.mesh_id, "sha256": ref.sha256,
            "nv": ref.n_vertices, "nt": ref.n_triangles}


def _mesh_ref_from_obj(value, field: str) -> MeshRef:
    body = _obj(value, field, ("mesh_id", "sha256", "nv", "nt"))
    try:
        return MeshRef(
            mesh_id=_string(body["mesh_id"], f"{field}.mesh_id"),
            sha256=_string(body["sha256"], f"{field}.sha256"),
            n_vertices=_integer(body["nv"], f"{field}.nv", hi=2**31 - 1),
            n_triangles=_integer(body["nt"], f"{field}.nt", hi=2**31 - 1))
    except ValueError as exc:
        if isinstance(exc, DecodeError):
            raise
        raise DecodeError(f"field '{field}': {exc}") from None


def encode_control(frame: ControlFrame) -> bytes:
    if isinstance(frame, Welcome):
        return _dumps({
            "control": "welcome", "room": frame.room_id, "you": frame.you,
            "members": [[p, n] for p, n in frame.members],
            "last_seq": frame.last_seq, "state": _state_to_obj(frame.state),
            "saved": None if frame.saved is None else snapshot_to_obj(frame.saved),
            "mesh": None if frame.mesh is None else _mesh_ref_to_obj(frame.mesh)})
    if isinstance(frame, Refused):
        return _dumps({"control": "refused", "reason": frame.reason})
    if isinstance(frame, ErrorReply):
        return _dumps({"control": "error", "reason": frame.reason})
    if isinstance(frame, BlobRequest):
        return _dumps({"control": "blob_get", "mesh_id": frame.mesh_id})
    if isinstance(frame, BlobData):
        return _dumps({"control": "blob", "mesh_id": frame.mesh_id,
                       "sha256": frame.sha256, "vertices": list(frame.vertices),
                       "triangles": list(frame.triangles)})
    raise TypeError(f"not a control frame: {frame!r}")


def _decode_welcome(obj: dict) -> Welcome:
    _obj(obj, "frame", ("control", "room", "you", "members", "last_seq",
                        "state", "saved", "mesh"))
    raw_members = obj["members"]
    if not isinstance(raw_members, list):
        raise DecodeError("field 'members': expected a list")
    members = []
    for i, pair in enumerate(raw_members):
        if not isinstance(pair, list) or len(pair) != 2:
            raise DecodeError(f"field 'members[{i}]': expected [peer_id, name]")
        members.append((_string(pair[0], f"members[{i}][0]"),
                        _string(pair[1], f"members[{i}][1]", allow_empty=True)))
    return Welcome(
        room_id=_string(obj["room"], "room"),
        you=_string(obj["you"], "you"),
        members=tuple(members),
        last_seq=_integer(obj["last_seq"], "last_seq"),
        state=_state_from_obj(obj["state"], "state"),
        saved=None if obj["saved"] is None else snapshot_from_obj(obj["saved"], "saved"),
        mesh=None if obj["mesh"] is None else _mesh_ref_from_obj(obj["mesh"], "mesh"))


def _decode_control_obj(obj: dict) -> ControlFrame:
    kind = _string(obj.get("control"), "control")
    if kind == "welcome":
        return _decode_welcome(obj)
    if kind == "refused":
        _obj(obj, "frame", ("control", "reason"))
        return Refused(_string(obj["reason"], "reason", allow_empty=True))
    if kind == "error":
        _obj(obj, "frame", ("control", "reason"))
        return ErrorReply(_string(obj["reason"], "reason", allow_empty=True))
    if kind == "blob_get":
        _obj(obj, "frame", ("control", "mesh_id"))
        return BlobRequest(_string(obj["mesh_id"], "mesh_id"))
    if kind == "blob":
        _obj(obj, "frame", ("control", "mesh_id", "sha256", "vertices", "triangles"))
        try:
            return BlobData(
                mesh_id=_string(obj["mesh_id"], "mesh_id"),
                sha256=_string(obj["sha256"], "sha256"),
                vertices=_flat_reals(obj["vertices"], "vertices"),
                triangles=_flat_ints(obj["triangles"], "triangles"))
        except ValueError as exc:
            if isinstance(exc, DecodeError):
                raise
            raise DecodeError(f"field 'frame': {exc}") from None
    raise DecodeError(f"field 'control': unknown control frame {kind!r}")


def decode_control(data: bytes | str) -> ControlFrame:
    obj = _loads(data)
    if "control" not in obj:
        raise DecodeError("frame is an envelope, not a control frame")
    return _decode_control_obj(obj)


def decode_frame(data: bytes | str) -> Envelope | ControlFrame:
    """Decode either frame kind; the socket loops route on the result type."""
    obj = _loads(data)
    if "control" in obj:
        return _decode_control_obj(obj)
    return _decode_envelope_obj(obj)


# ---------------------------------------------------------------------------
# mesh content addressing

def mesh_blob_bytes(vertices, triangles) -> bytes:
    """Canonical bytes for hashing and storing an imported model."""
    flat_v = [float(v) for v in vertices]
    flat_t = [int(t) for t in triangles]
    return _dumps({"vertices": flat_v, "triangles": flat_t})


def mesh_sha256(vertices, triangles) -> str:
    return hashlib.sha256(mesh_blob_bytes(vertices, triangles)).hexdigest()


# ---------------------------------------------------------------------------
# the rejected alternative, kept only to measure against

def encode_full_transform(seq: int, sender_id: str, sent_at: int,
                          state: ModelState) -> bytes:
    """Encode the whole model pose as a 4x4 matrix message.

    This is the design the delta protocol replaces; it exists so byte
    counts can be compared under the identical envelope framing and number
    formatting.  Nothing decodes it.
    """
    m3 = state.orientation.to_matrix()
    s = state.scale
    ax, ay, az = state.anchor
    m = [m3[0][0] * s, m3[0][1] * s, m3[0][2] * s, ax,
         m3[1][0] * s, m3[1][1] * s, m3[1][2] * s, ay,
         m3[2][0] * s, m3[2][1] * s, m3[2][2] * s, az,
         0.0, 0.0, 0.0, 1.0]
    return _dumps({"seq": seq, "sender": sender_id, "ts": sent_at,
                   "type": "xform", "body": {"m": m}})
