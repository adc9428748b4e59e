"""The replicated-state machine every peer runs.

A SharedState consumes the totally ordered envelope stream.  Envelopes
are applied exactly once, in ascending seq order: early arrivals wait in
a pending buffer, stale seqs are dropped, and the state after seq N is a
pure function of the prefix 1..N.  Two replicas that saw the same set of
envelopes, in any arrival order and with any duplication, are therefore
identical; :func:`divergence` measures how far apart two replicas are.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

from ..geometry import (
    DEFAULT_SCALE_MAX,
    DEFAULT_SCALE_MIN,
    ModelState,
    RotationDelta,
    ScaleDelta,
    TwistDelta,
    apply_delta,
)
from . import codec
from .messages import (
    AnchorSet,
    Envelope,
    Join,
    Leave,
    MeshRef,
    ModelImport,
    PlaneUpdate,
    Snapshot,
    SnapshotRestore,
    SnapshotSave,
    Welcome,
)

__all__ = ["ProtocolError", "SharedState", "apply_envelope", "divergence",
           "snapshot_of"]


class ProtocolError(ValueError):
    """Envelope violates the protocol contract (as opposed to being
    malformed on the wire, which is DecodeError territory)."""


@dataclass
class SharedState:
    """One peer's replica of the room.

    Single-writer: one logical applier mutates it; the contained model
    values are immutable and safe to hand across threads.
    """
    model: ModelState = field(default_factory=ModelState)
    last_applied_seq: int = 0
    saved: Snapshot | None = None
    members: dict[str, str] = field(default_factory=dict)
    pending: dict[int, Envelope] = field(default_factory=dict)
    # content-addressed handle to the current model blob; replicas track the
    # reference, the blob itself travels out-of-band
    mesh_ref: MeshRef | None = None
    scale_min: float = DEFAULT_SCALE_MIN
    scale_max: float = DEFAULT_SCALE_MAX

    @classmethod
    def from_welcome(cls, welcome: Welcome) -> "SharedState":
        """Late-joiner construction: authoritative state, no replay."""
        return cls(model=welcome.state,
                   last_applied_seq=welcome.last_seq,
                   saved=welcome.saved,
                   members=dict(welcome.members),
                   mesh_ref=welcome.mesh)

    def copy(self) -> "SharedState":
        return SharedState(model=self.model,
                           last_applied_seq=self.last_applied_seq,
                           saved=self.saved,
                           members=dict(self.members),
                           pending=dict(self.pending),
                           mesh_ref=self.mesh_ref,
                           scale_min=self.scale_min,
                           scale_max=self.scale_max)

    def apply(self, envelope: Envelope) -> int:
        """Consume one envelope; returns how many were applied (the
        envelope itself plus any pending ones it unblocked), 0 if it was
        a duplicate or went to the buffer."""
        if envelope.seq == 0:
            raise ProtocolError("envelope was never sequenced (seq 0)")
        if envelope.seq <= self.last_applied_seq:
            return 0  # duplicate, idempotent drop
        if envelope.seq > self.last_applied_seq + 1:
            self.pending[envelope.seq] = envelope
            return 0
        applied = 0
        self._apply_payload(envelope)
        applied += 1
        # drain the buffer while it holds the next consecutive seq
        while self.last_applied_seq + 1 in self.pending:
            self._apply_payload(self.pending.pop(self.last_applied_seq + 1))
            applied += 1
        return applied

    def _apply_payload(self, envelope: Envelope) -> None:
        payload = envelope.payload
        if isinstance(payload, (RotationDelta, ScaleDelta, TwistDelta)):
            self.model = apply_delta(self.model, payload,
                                     self.scale_min, self.scale_max)
        elif isinstance(payload, PlaneUpdate):
            # wholesale replacement, exactly as decoded: every replica
            # slices from the same four numbers
            self.model = replace(self.model, plane=payload.plane)
        elif isinstance(payload, AnchorSet):
            self.model = replace(self.model, anchor=payload.translation)
        elif isinstance(payload, SnapshotSave):
            self.saved = Snapshot(self.model.orientation, self.model.scale,
                                  self.model.plane)
        elif isinstance(payload, SnapshotRestore):
            snap = payload.snapshot
            if snap is None:
                raise ProtocolError("restore carries no snapshot")
            scale = min(max(snap.scale, self.scale_min), self.scale_max)
            self.model = replace(self.model, orientation=snap.orientation,
                                 scale=scale, plane=snap.plane)
        elif isinstance(payload, ModelImport):
            self.mesh_ref = _import_ref(payload)
        elif isinstance(payload, Join):
            self.members[envelope.sender_id] = payload.name
        elif isinstance(payload, Leave):
            self.members.pop(envelope.sender_id, None)
        else:
            raise ProtocolError(f"unknown payload {payload!r}")
        self.last_applied_seq = envelope.seq

    def snapshot(self) -> Snapshot:
        return Snapshot(self.model.orientation, self.model.scale,
                        self.model.plane)

    def digest(self) -> str:
        """Stable hash of everything replicated; equal replicas hash equal."""
        obj = {
            "seq": self.last_applied_seq,
            "state": {
                "q": [self.model.orientation.w, self.model.orientation.x,
                      self.model.orientation.y, self.model.orientation.z],
                "scale": self.model.scale,
                "abcd": [self.model.plane.a, self.model.plane.b,
                         self.model.plane.c, self.model.plane.d],
                "anchor": list(self.model.anchor),
            },
            "saved": None if self.saved is None else codec.snapshot_to_obj(self.saved),
            "members": sorted(self.members.items()),
            "mesh": None if self.mesh_ref is None else [
                self.mesh_ref.mesh_id, self.mesh_ref.sha256,
                self.mesh_ref.n_vertices, self.mesh_ref.n_triangles],
        }
        text = json.dumps(obj, separators=(",", ":"), allow_nan=False)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _import_ref(payload: ModelImport) -> MeshRef:
    if payload.is_inline:
        return MeshRef(mesh_id=payload.mesh_id,
                       sha256=codec.mesh_sha256(payload.vertices, payload.triangles),
                       n_vertices=len(payload.vertices) // 3,
                       n_triangles=len(payload.triangles) // 3)
    return MeshRef(mesh_id=payload.mesh_id, sha256=payload.sha256,
                   n_vertices=payload.n_vertices, n_triangles=payload.n_triangles)


def apply_envelope(state: SharedState, envelope: Envelope) -> SharedState:
    """Spec-shaped entry point; mutates state in place and returns it."""
    state.apply(envelope)
    return state


def snapshot_of(state: SharedState) -> Snapshot:
    return state.snapshot()


def divergence(a: SharedState, b: SharedState) -> float:
    """Worst componentwise distance between two replicas.

    Infinity when the replicas disagree on anything discrete (applied
    seq, membership, saved-slot presence, mesh identity); otherwise the
    max absolute difference over orientation (up to quaternion sign),
    scale, plane, anchor, and the saved snapshot.
    """
    if a.last_applied_seq != b.last_applied_seq:
        return float("inf")
    if a.members != b.members:
        return float("inf")
    if (a.saved is None) != (b.saved is None):
        return float("inf")
    if a.mesh_ref != b.mesh_ref:
        return float("inf")
    worst = a.model.orientation.rotation_diff(b.model.orientation)
    worst = max(worst, abs(a.model.scale - b.model.scale))
    pa, pb = a.model.plane, b.model.plane
    worst = max(worst, abs(pa.a - pb.a), abs(pa.b - pb.b),
                abs(pa.c - pb.c), abs(pa.d - pb.d))
    for va, vb in zip(a.model.anchor, b.model.anchor):
        worst = max(worst, abs(va - vb))
    if a.saved is not None and b.saved is not None:
        worst = max(worst, a.saved.orientation.rotation_diff(b.saved.orientation))
        worst = max(worst, abs(a.saved.scale - b.saved.scale))
        sa, sb = a.saved.plane, b.saved.plane
        worst = max(worst, abs(sa.a - sb.a), abs(sa.b - sb.b),
                    abs(sa.c - sb.c), abs(sa.d - sb.d))
    return worst
