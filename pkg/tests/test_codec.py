"""Wire codec: exact roundtrips, strict rejection, fuzz resilience."""
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sliceroom.geometry import (
    ModelState,
    Plane,
    Quaternion,
    RotationDelta,
    ScaleDelta,
    TwistDelta,
)
from sliceroom.protocol import (
    AnchorSet,
    BlobData,
    BlobRequest,
    DecodeError,
    Envelope,
    ErrorReply,
    Join,
    Leave,
    MeshRef,
    ModelImport,
    PlaneUpdate,
    Refused,
    Snapshot,
    SnapshotRestore,
    SnapshotSave,
    Welcome,
    decode_control,
    decode_envelope,
    decode_frame,
    encode_control,
    encode_envelope,
    encode_full_transform,
    mesh_sha256,
)

Q = Quaternion.from_axis_angle((0.0, 1.0, 0.0), 0.7)
SNAP = Snapshot(orientation=Q, scale=2.5, plane=Plane(0.0, 0.0, 1.0, 3.25))

PAYLOADS = [
    RotationDelta(Q),
    ScaleDelta(1.4142135623730951),
    TwistDelta(0.25, (0.0, 0.0, 1.0)),
    PlaneUpdate(Plane(0.6, 0.8, 0.0, -2.125)),
    AnchorSet((1.5, -2.25, 0.0)),
    SnapshotSave(),
    SnapshotRestore(SNAP),
    ModelImport(mesh_id="m1", vertices=(0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0),
                triangles=(0, 1, 2)),
    ModelImport(mesh_id="m2", sha256="ab" * 32, n_vertices=100, n_triangles=196),
    Join("alice"),
    Leave(),
]


def envelope_with(payload, seq=7) -> Envelope:
    return Envelope(seq=seq, sender_id="p1", sent_at=123456, payload=payload)


# --- roundtrips ------------------------------------------------------------

@pytest.mark.parametrize("payload", PAYLOADS, ids=lambda p: type(p).__name__)
def test_envelope_roundtrip_is_identity(payload):
    env = envelope_with(payload)
    back = decode_envelope(encode_envelope(env))
    assert back == env


@pytest.mark.parametrize("payload", PAYLOADS, ids=lambda p: type(p).__name__)
def test_encoding_is_stable(payload):
    env = envelope_with(payload)
    data = encode_envelope(env)
    assert encode_envelope(decode_envelope(data)) == data


def test_frame_is_one_compact_json_object():
    data = encode_envelope(envelope_with(ScaleDelta(2.0)))
    assert b"\n" not in data and b" " not in data
    obj = json.loads(data)
    assert set(obj) == {"seq", "sender", "ts", "type", "body"}


def test_float_bits_survive_exactly():
    # values whose decimal expansions are awkward
    for f in (0.1, 1 / 3, 1e-300, 1.7976931348623157e308, 5e-324):
        env = envelope_with(ScaleDelta(f))
        assert decode_envelope(encode_envelope(env)).payload.factor == f


def test_decode_frame_routes_both_kinds():
    env = envelope_with(Join("bob"))
    assert decode_frame(encode_envelope(env)) == env
    ctrl = Refused("room full")
    assert decode_frame(encode_control(ctrl)) == ctrl


def test_envelope_and_control_do_not_cross_decode():
    with pytest.raises(DecodeError):
        decode_envelope(encode_control(Refused("x")))
    with pytest.raises(DecodeError):
        decode_control(encode_envelope(envelope_with(Leave())))


# --- control frames --------------------------------------------------------

CONTROLS = [
    Welcome(room_id="heart", you="p3",
            members=(("p1", "alice"), ("p2", "bob"), ("p3", "carol")),
            last_seq=41,
            state=ModelState(orientation=Q, scale=0.5, anchor=(1.0, 2.0, 3.0),
                             plane=Plane(0.0, 1.0, 0.0, 0.125)),
            saved=SNAP,
            mesh=MeshRef(mesh_id="m1", sha256="cd" * 32,
                         n_vertices=8, n_triangles=12)),
    Welcome(room_id="r", you="p1", members=(("p1", ""),), last_seq=0,
            state=ModelState(), saved=None, mesh=None),
    Refused("room full"),
    ErrorReply("field 'body.f': scale factor must be positive"),
    BlobRequest("m1"),
    BlobData(mesh_id="m1", sha256=mesh_sha256([0.0] * 9, [0, 1, 2]),
             vertices=(0.0,) * 9, triangles=(0, 1, 2)),
]


@pytest.mark.parametrize("frame", CONTROLS, ids=lambda f: type(f).__name__)
def test_control_roundtrip_is_identity(frame):
    assert decode_control(encode_control(frame)) == frame


# --- strict rejection ------------------------------------------------------

def valid_obj():
    return json.loads(encode_envelope(envelope_with(ScaleDelta(2.0))))


def mutate(**changes):
    obj = valid_obj()
    for key, value in changes.items():
        if value is ...:
            del obj[key]
        else:
            obj[key] = value
    return json.dumps(obj).encode()


@pytest.mark.parametrize("data,needle", [
    (b"", "frame"),
    (b"not json", "not valid JSON"),
    (b"[1,2]", "object"),
    (b'"hi"', "object"),
    (mutate(seq=...), "seq"),
    (mutate(extra=1), "extra"),
    (mutate(seq=-1), "seq"),
    (mutate(seq=1.5), "seq"),
    (mutate(seq=True), "seq"),
    (mutate(sender=""), "sender"),
    (mutate(sender=7), "sender"),
    (mutate(ts=-3), "ts"),
    (mutate(type="warp"), "warp"),
    (mutate(body={}), "f"),
    (mutate(body={"f": 2.0, "g": 1.0}), "g"),
    (mutate(body={"f": "2.0"}), "body.f"),
    (mutate(body={"f": -1.0}), "body.f"),
    (mutate(body={"f": 0.0}), "body.f"),
    (mutate(body={"f": True}), "body.f"),
], ids=lambda v: repr(v)[:40])
def test_malformed_frames_name_the_problem(data, needle):
    with pytest.raises(DecodeError) as exc:
        decode_envelope(data)
    assert needle in str(exc.value)


def test_nan_and_infinity_rejected_on_decode():
    # raw bytes: json.dumps would refuse to produce these in the first place
    for token in (b"NaN", b"Infinity", b"-Infinity"):
        raw = b'{"seq":7,"sender":"p1","ts":0,"type":"scale","body":{"f":' + token + b"}}"
        with pytest.raises(DecodeError):
            decode_envelope(raw)


def test_nan_rejected_on_encode():
    env = Envelope(seq=1, sender_id="p1", sent_at=0,
                   payload=AnchorSet((float("nan"), 0.0, 0.0)))
    with pytest.raises(ValueError):
        encode_envelope(env)


def test_zero_quaternion_rejected():
    raw = b'{"seq":1,"sender":"p1","ts":0,"type":"rot","body":{"q":[0,0,0,0]}}'
    with pytest.raises(DecodeError, match="body.q"):
        decode_envelope(raw)


def test_wrong_arity_vectors_rejected():
    raw = b'{"seq":1,"sender":"p1","ts":0,"type":"anchor","body":{"xyz":[1,2]}}'
    with pytest.raises(DecodeError, match="body.xyz"):
        decode_envelope(raw)
    raw = b'{"seq":1,"sender":"p1","ts":0,"type":"rot","body":{"q":[1,0,0]}}'
    with pytest.raises(DecodeError, match="body.q"):
        decode_envelope(raw)


def test_import_shape_is_exclusive():
    raw = (b'{"seq":1,"sender":"p1","ts":0,"type":"import","body":'
           b'{"mesh_id":"m","vertices":[0,0,0],"triangles":[0,0,0],"sha256":"ab"}}')
    with pytest.raises(DecodeError, match="import"):
        decode_envelope(raw)


def test_restore_requires_snapshot_object():
    raw = b'{"seq":1,"sender":"p1","ts":0,"type":"restore","body":{"snapshot":null}}'
    with pytest.raises(DecodeError, match="snapshot"):
        decode_envelope(raw)


# --- leniency: near-unit values are repaired, exact units untouched --------

def test_near_unit_quaternion_renormalized():
    w = 1.0 + 5e-7  # beyond UNIT_TOL, within repairable range
    raw = (f'{{"seq":1,"sender":"p1","ts":0,"type":"rot",'
           f'"body":{{"q":[{w!r},0.0,0.0,0.0]}}}}').encode()
    dq = decode_envelope(raw).payload.dq
    assert dq.is_unit(1e-12)


def test_exactly_unit_quaternion_keeps_bits():
    env = envelope_with(RotationDelta(Q))
    back = decode_envelope(encode_envelope(env))
    assert (back.payload.dq.w, back.payload.dq.x,
            back.payload.dq.y, back.payload.dq.z) == (Q.w, Q.x, Q.y, Q.z)


def test_near_unit_plane_normal_renormalized():
    raw = (b'{"seq":1,"sender":"p1","ts":0,"type":"plane",'
           b'"body":{"abcd":[2.0,0.0,0.0,4.0]}}')
    plane = decode_envelope(raw).payload.plane
    assert (plane.a, plane.b, plane.c, plane.d) == (1.0, 0.0, 0.0, 2.0)


def test_plane_fidelity_decoded_equals_wire_values():
    p = Plane(0.6, 0.8, 0.0, -2.125)
    back = decode_envelope(encode_envelope(envelope_with(PlaneUpdate(p))))
    assert (back.payload.plane.a, back.payload.plane.b,
            back.payload.plane.c, back.payload.plane.d) == (p.a, p.b, p.c, p.d)


# --- properties ------------------------------------------------------------

@given(st.floats(allow_nan=False, allow_infinity=False, width=64)
       .filter(lambda x: x > 0.0))
def test_scale_factor_roundtrips_any_positive_float(f):
    env = envelope_with(ScaleDelta(f))
    assert decode_envelope(encode_envelope(env)).payload.factor == f


@settings(max_examples=300)
@given(st.binary(max_size=300))
def test_fuzzed_bytes_never_crash_the_parser(data):
    try:
        decode_frame(data)
    except DecodeError:
        pass


# --- size comparison -------------------------------------------------------

def test_rotation_delta_smaller_than_full_matrix():
    env = envelope_with(RotationDelta(Q), seq=901)
    state = ModelState(orientation=Q, scale=1.2345678901234567,
                       anchor=(10.5, -3.25, 0.125))
    full = encode_full_transform(901, env.sender_id, env.sent_at, state)
    assert len(encode_envelope(env)) < len(full)


def test_mesh_sha256_is_stable_and_input_sensitive():
    v = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]
    t = [0, 1, 2]
    h1 = mesh_sha256(v, t)
    h2 = mesh_sha256(list(v), tuple(t))
    assert h1 == h2
    assert len(h1) == 64
    assert mesh_sha256(v, [0, 2, 1]) != h1
