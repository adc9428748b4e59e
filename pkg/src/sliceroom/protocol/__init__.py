"""Wire schema, canonical codec, and the replicated-state machine."""
from .codec import (
    DecodeError,
    decode_control,
    decode_envelope,
    decode_frame,
    encode_control,
    encode_envelope,
    encode_full_transform,
    mesh_blob_bytes,
    mesh_sha256,
    snapshot_from_obj,
    snapshot_to_obj,
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
    RotationDelta,
    ScaleDelta,
    Snapshot,
    SnapshotRestore,
    SnapshotSave,
    TwistDelta,
    Welcome,
)
from .replica import ProtocolError, SharedState, apply_envelope, divergence, snapshot_of

__all__ = [
    "AnchorSet", "BlobData", "BlobRequest", "ControlFrame", "DecodeError",
    "Envelope", "ErrorReply", "Join", "Leave", "MeshRef", "ModelImport",
    "Payload", "PlaneUpdate", "ProtocolError", "Refused", "RotationDelta",
    "ScaleDelta", "SharedState", "Snapshot", "SnapshotRestore", "SnapshotSave",
    "TwistDelta", "Welcome", "apply_envelope", "decode_control",
    "decode_envelope", "decode_frame", "divergence", "encode_control",
    "encode_envelope", "encode_full_transform", "mesh_blob_bytes",
    "mesh_sha256", "snapshot_from_obj", "snapshot_to_obj", "snapshot_of",
]
