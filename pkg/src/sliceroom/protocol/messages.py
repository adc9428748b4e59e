"""Wire message vocabulary: envelope payloads and control frames.

Two kinds of frame travel over a session socket.  Envelopes are the
replicated stream: stamped with a server-assigned sequence number and
applied by every replica in seq order.  Control frames are point-to-point
plumbing (welcome, refusals, blob transfer) and never carry a seq.

The model-transform payloads are the same delta structures the gesture
layer produces, imported from the geometry package; one structure per
gesture type rather than a transform matrix keeps frames small.  The
slicing plane is the exception: it is always sent as the full equation, so
a late edit never depends on a peer's previous plane.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..geometry import (
    ModelState,
    Plane,
    Quaternion,
    RotationDelta,
    ScaleDelta,
    TwistDelta,
)

__all__ = [
    "AnchorSet", "BlobData", "BlobRequest", "Envelope", "ErrorReply", "Join",
    "Leave", "MeshRef", "ModelImport", "Payload", "PlaneUpdate", "Refused",
    "RotationDelta", "ScaleDelta", "Snapshot", "SnapshotRestore",
    "SnapshotSave", "TwistDelta", "Welcome",
]

SHA256_HEX_LEN = 64


@dataclass(frozen=True, slots=True)
class Snapshot:
    """The saved triple: orientation, scale, plane.  Anchor is deliberately
    excluded so a restore never teleports the model in peers' rooms."""
    orientation: Quaternion
    scale: float
    plane: Plane


@dataclass(frozen=True, slots=True)
class PlaneUpdate:
    """Full slicing-plane equation, not a delta; replaces the replica plane
    wholesale so every peer slices from literally the same four numbers."""
    plane: Plane


@dataclass(frozen=True, slots=True)
class AnchorSet:
    """Absolute world-space placement of the model."""
    translation: tuple[float, float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "translation", _vec3(self.translation, "translation"))


@dataclass(frozen=True, slots=True)
class SnapshotSave:
    """Copy the current orientation/scale/plane into the shared saved slot."""


@dataclass(frozen=True, slots=True)
class SnapshotRestore:
    """Restore the carried snapshot.  The snapshot always travels in the
    envelope so replicas that never saw the save still converge."""
    snapshot: Snapshot


@dataclass(frozen=True, slots=True)
class ModelImport:
    """Replace the session model, either inline (small meshes) or by
    content hash with the blob fetched over a control frame.

    Exactly one form: inline sets vertices+triangles, hashed sets
    sha256+n_vertices+n_triangles.  The relay rewrites inline imports to
    the hashed form before broadcast, keeping the envelope stream small.
    """
    mesh_id: str
    vertices: tuple[float, ...] | None = None
    triangles: tuple[int, ...] | None = None
    sha256: str | None = None
    n_vertices: int | None = None
    n_triangles: int | None = None

    def __post_init__(self) -> None:
        if not self.mesh_id:
            raise ValueError("mesh_id must be non-empty")
        inline = self.vertices is not None or self.triangles is not None
        hashed = (self.sha256 is not None or self.n_vertices is not None
                  or self.n_triangles is not None)
        if inline == hashed:
            raise ValueError("ModelImport must be inline or hashed, not both or neither")
        if inline:
            if self.vertices is None or self.triangles is None:
                raise ValueError("inline ModelImport needs vertices and triangles")
            object.__setattr__(self, "vertices", tuple(float(v) for v in self.vertices))
            object.__setattr__(self, "triangles", tuple(int(t) for t in self.triangles))
            _check_flat_mesh(self.vertices, self.triangles)
        else:
            if self.sha256 is None or self.n_vertices is None or self.n_triangles is None:
                raise ValueError("hashed ModelImport needs sha256, n_vertices, n_triangles")
            _check_sha256(self.sha256)
            if self.n_vertices < 0 or self.n_triangles < 0:
                raise ValueError("mesh counts must be non-negative")

    @property
    def is_inline(self) -> bool:
        return self.vertices is not None


@dataclass(frozen=True, slots=True)
class Join:
    name: str


@dataclass(frozen=True, slots=True)
class Leave:
    pass


Payload = (RotationDelta | ScaleDelta | TwistDelta | PlaneUpdate | AnchorSet
           | SnapshotSave | SnapshotRestore | ModelImport | Join | Leave)


@dataclass(frozen=True, slots=True)
class Envelope:
    """One replicated message.  seq is server-assigned and totally ordered
    per room; clients send seq 0 and apply only the stamped echo."""
    seq: int
    sender_id: str
    sent_at: int
    payload: Payload

    def __post_init__(self) -> None:
        if not isinstance(self.seq, int) or self.seq < 0:
            raise ValueError(f"seq must be a non-negative integer, got {self.seq!r}")
        if not self.sender_id:
            raise ValueError("sender_id must be non-empty")
        if not isinstance(self.sent_at, int) or self.sent_at < 0:
            raise ValueError("sent_at must be a non-negative integer")


# ---------------------------------------------------------------------------
# control frames (never sequenced)

@dataclass(frozen=True, slots=True)
class MeshRef:
    """Content-addressed handle to the room's current model blob."""
    mesh_id: str
    sha256: str
    n_vertices: int
    n_triangles: int

    def __post_init__(self) -> None:
        _check_sha256(self.sha256)


@dataclass(frozen=True, slots=True)
class Welcome:
    """Join acknowledgment: everything a late joiner needs to reach the
    authoritative state without replaying history."""
    room_id: str
    you: str
    members: tuple[tuple[str, str], ...]  # (peer_id, name), includes you
    last_seq: int
    state: ModelState
    saved: Snapshot | None = None
    mesh: MeshRef | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "members",
            tuple((str(p), str(n)) for p, n in self.members))


@dataclass(frozen=True, slots=True)
class Refused:
    reason: str


@dataclass(frozen=True, slots=True)
class ErrorReply:
    reason: str


@dataclass(frozen=True, slots=True)
class BlobRequest:
    mesh_id: str


@dataclass(frozen=True, slots=True)
class BlobData:
    mesh_id: str
    sha256: str
    vertices: tuple[float, ...] = field(default=())
    triangles: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        _check_sha256(self.sha256)
        object.__setattr__(self, "vertices", tuple(float(v) for v in self.vertices))
        object.__setattr__(self, "triangles", tuple(int(t) for t in self.triangles))
        _check_flat_mesh(self.vertices, self.triangles)


ControlFrame = Welcome | Refused | ErrorReply | BlobRequest | BlobData


# ---------------------------------------------------------------------------
# shared validation helpers

def _vec3(value, what: str) -> tuple[float, float, float]:
    xyz = tuple(float(v) for v in value)
    if len(xyz) != 3:
        raise ValueError(f"{what} must have exactly 3 components")
    return xyz


def _check_sha256(value: str) -> None:
    if len(value) != SHA256_HEX_LEN or any(c not in "0123456789abcdef" for c in value):
        raise ValueError("sha256 must be 64 lowercase hex characters")


def _check_flat_mesh(vertices: tuple[float, ...], triangles: tuple[int, ...]) -> None:
    if len(vertices) % 3 != 0:
        raise ValueError("flat vertex list length must be a multiple of 3")
    if len(triangles) % 3 != 0:
        raise ValueError("flat triangle list length must be a multiple of 3")
    n_vertices = len(vertices) // 3
    for t in triangles:
        if t < 0 or t >= n_vertices:
            raise ValueError(f"triangle index {t} out of range for {n_vertices} vertices")
