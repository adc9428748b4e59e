"""Room relay logic, independent of any transport.

A RoomManager owns the authoritative replica per room, assigns the
sequence numbers that define the shared order, and answers every inbound
event with a list of (peer_id, frame bytes) deliveries.  The websocket
layer and the in-process simulator both drive this same class, so the
logic under test in the simulator is the logic that serves real clients.

All methods for one room must be called serially (the asyncio server
handles frames on one loop without awaiting mid-handle; the simulator is
single-threaded).  Time is always passed in as milliseconds, never read
from a wall clock here, which is what makes simulated runs deterministic.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable

from ..protocol import (
    BlobData,
    BlobRequest,
    DecodeError,
    Envelope,
    ErrorReply,
    Join,
    Leave,
    MeshRef,
    ModelImport,
    ProtocolError,
    Refused,
    SharedState,
    Snapshot,
    SnapshotSave,
    Welcome,
    decode_frame,
    encode_control,
    encode_envelope,
    mesh_sha256,
)
from ..store import ROOM_ID_RE, SnapshotRecord, SnapshotStore, StoreError

__all__ = ["DEFAULT_CAPACITY", "DEFAULT_GRACE_MS", "JoinResult", "Room",
           "RoomManager"]

log = logging.getLogger("sliceroom.server")

DEFAULT_CAPACITY = 16
DEFAULT_GRACE_MS = 30_000
MAX_NAME_LEN = 64

# (peer_id, frame bytes) the transport must deliver
Delivery = tuple[str, bytes]


@dataclass
class Room:
    room_id: str
    state: SharedState = field(default_factory=SharedState)
    peer_counter: itertools.count = field(default_factory=lambda: itertools.count(1))
    blob_frame: bytes | None = None  # pre-encoded BlobData answer
    blob_ref: MeshRef | None = None
    emptied_at: int | None = None  # set while the room has no members

    @property
    def next_seq(self) -> int:
        return self.state.last_applied_seq + 1

    def stamp(self, sender_id: str, sent_at: int, payload) -> Envelope:
        """Assign the next seq and apply to the authoritative replica."""
        envelope = Envelope(self.next_seq, sender_id, sent_at, payload)
        self.state.apply(envelope)
        return envelope


@dataclass(frozen=True, slots=True)
class JoinResult:
    """Refusals carry deliveries addressed to peer_id "" meaning the
    not-yet-admitted connection that attempted the join."""
    accepted: bool
    peer_id: str | None
    deliveries: list[Delivery]


class RoomManager:
    def __init__(self, *, room_capacity: int = DEFAULT_CAPACITY,
                 grace_ms: int = DEFAULT_GRACE_MS,
                 store: SnapshotStore | None = None):
        if room_capacity < 1:
            raise ValueError("room capacity must be at least 1")
        self.room_capacity = room_capacity
        self.grace_ms = grace_ms
        self.store = store
        self.rooms: dict[str, Room] = {}
        # observation hook for bandwidth accounting: called once per
        # broadcast envelope with (room, envelope, frame, recipient count)
        self.on_broadcast: Callable[[Room, Envelope, bytes, int], None] | None = None

    # -- lifecycle ----------------------------------------------------------

    def join(self, room_id: str, name: str, now_ms: int) -> JoinResult:
        """Admit a peer: welcome to the joiner, Join envelope to the rest."""
        self.purge_idle_rooms(now_ms)
        if not ROOM_ID_RE.match(room_id):
            frame = encode_control(Refused(f"invalid room id {room_id!r}"))
            return JoinResult(False, None, [("", frame)])
        if len(name) > MAX_NAME_LEN:
            frame = encode_control(Refused("name too long"))
            return JoinResult(False, None, [("", frame)])
        room = self.rooms.get(room_id)
        if room is None:
            room = self._create_room(room_id)
        if len(room.state.members) >= self.room_capacity:
            frame = encode_control(Refused(f"room {room_id!r} is full"))
            return JoinResult(False, None, [("", frame)])
        peer_id = f"p{next(room.peer_counter)}"
        others = list(room.state.members)
        envelope = room.stamp(peer_id, now_ms, Join(name))
        room.emptied_at = None
        deliveries = [(peer_id, encode_control(self._welcome(room, peer_id)))]
        join_frame = encode_envelope(envelope)
        deliveries.extend((other, join_frame) for other in others)
        self._broadcast_hook(room, envelope, join_frame, len(others))
        log.info("room %s: %s joined as %s (%d members)",
                 room_id, name or "<anonymous>", peer_id, len(room.state.members))
        return JoinResult(True, peer_id, deliveries)

    def _create_room(self, room_id: str) -> Room:
        room = Room(room_id)
        if self.store is not None:
            # a saved slot outlives the session that wrote it
            try:
                record = self.store.load(room_id)
            except StoreError as exc:
                log.warning("room %s: ignoring unreadable saved slot: %s", room_id, exc)
                record = None
            if record is not None:
                room.state.saved = record.snapshot
        self.rooms[room_id] = room
        log.info("room %s created", room_id)
        return room

    def _welcome(self, room: Room, peer_id: str) -> Welcome:
        state = room.state
        return Welcome(room_id=room.room_id, you=peer_id,
                       members=tuple(state.members.items()),
                       last_seq=state.last_applied_seq,
                       state=state.model, saved=state.saved,
                       mesh=room.blob_ref)

    def disconnect(self, room_id: str, peer_id: str, now_ms: int) -> list[Delivery]:
        """Socket went away: synthesize the Leave so the room never stalls."""
        room = self.rooms.get(room_id)
        if room is None or peer_id not in room.state.members:
            return []
        envelope = room.stamp(peer_id, now_ms, Leave())
        recipients = list(room.state.members)
        frame = encode_envelope(envelope)
        self._broadcast_hook(room, envelope, frame, len(recipients))
        if not room.state.members:
            room.emptied_at = now_ms
        log.info("room %s: %s left (%d members)", room_id, peer_id,
                 len(room.state.members))
        return [(other, frame) for other in recipients]

    def purge_idle_rooms(self, now_ms: int) -> None:
        """Drop rooms that have been empty longer than the grace period."""
        expired = [room_id for room_id, room in self.rooms.items()
                   if room.emptied_at is not None
                   and now_ms - room.emptied_at > self.grace_ms]
        for room_id in expired:
            del self.rooms[room_id]
            log.info("room %s purged after grace period", room_id)

    def lobby_list(self, now_ms: int) -> list[tuple[str, int]]:
        self.purge_idle_rooms(now_ms)
        return sorted((room_id, len(room.state.members))
                      for room_id, room in self.rooms.items())

    def stats(self) -> tuple[int, int]:
        """(room count, total member count) for the health line."""
        return (len(self.rooms),
                sum(len(room.state.members) for room in self.rooms.values()))

    # -- message handling ---------------------------------------------------

    def client_frame(self, room_id: str, peer_id: str, data: bytes,
                     now_ms: int) -> list[Delivery]:
        """Handle one frame from a connected member."""
        room = self.rooms.get(room_id)
        if room is None or peer_id not in room.state.members:
            return [(peer_id, encode_control(ErrorReply("not a room member")))]
        try:
            frame = decode_frame(data)
        except DecodeError as exc:
            return [(peer_id, encode_control(ErrorReply(str(exc))))]
        if isinstance(frame, Envelope):
            return self._client_envelope(room, peer_id, frame, now_ms)
        if isinstance(frame, BlobRequest):
            return [(peer_id, self._serve_blob(room, frame.mesh_id))]
        return [(peer_id, encode_control(
            ErrorReply(f"clients do not send {type(frame).__name__} frames")))]

    def _client_envelope(self, room: Room, peer_id: str, envelope: Envelope,
                         now_ms: int) -> list[Delivery]:
        payload = envelope.payload
        if isinstance(payload, (Join, Leave)):
            # membership envelopes are server-synthesized only
            return [(peer_id, encode_control(
                ErrorReply("join/leave are not client-sendable")))]
        if isinstance(payload, ModelImport):
            try:
                payload = self._ingest_import(room, payload)
            except ValueError as exc:
                return [(peer_id, encode_control(ErrorReply(str(exc))))]
        # the client's seq (0) and claimed sender are replaced: identity
        # comes from the connection, order comes from this stamp
        try:
            stamped = room.stamp(peer_id, envelope.sent_at, payload)
        except ProtocolError as exc:
            return [(peer_id, encode_control(ErrorReply(str(exc))))]
        deliveries: list[Delivery] = []
        if isinstance(payload, SnapshotSave):
            failure = self._persist_saved(room, now_ms)
            if failure is not None:
                deliveries.append((peer_id, encode_control(ErrorReply(failure))))
        frame = encode_envelope(stamped)
        recipients = list(room.state.members)  # sender-echo: includes sender
        deliveries.extend((member, frame) for member in recipients)
        self._broadcast_hook(room, stamped, frame, len(recipients))
        return deliveries

    def _ingest_import(self, room: Room, payload: ModelImport) -> ModelImport:
        """Store the blob and rewrite the envelope to the hashed form."""
        if payload.is_inline:
            digest = mesh_sha256(payload.vertices, payload.triangles)
            rewritten = ModelImport(mesh_id=payload.mesh_id, sha256=digest,
                                    n_vertices=len(payload.vertices) // 3,
                                    n_triangles=len(payload.triangles) // 3)
            room.blob_ref = MeshRef(payload.mesh_id, digest,
                                    rewritten.n_vertices, rewritten.n_triangles)
            room.blob_frame = encode_control(BlobData(
                mesh_id=payload.mesh_id, sha256=digest,
                vertices=payload.vertices, triangles=payload.triangles))
            return rewritten
        if room.blob_ref is None or payload.sha256 != room.blob_ref.sha256:
            raise ValueError(f"unknown mesh content {payload.sha256!r}; "
                             "send the mesh inline first")
        return payload

    def _serve_blob(self, room: Room, mesh_id: str) -> bytes:
        if room.blob_frame is None or room.blob_ref is None \
                or mesh_id != room.blob_ref.mesh_id:
            return encode_control(ErrorReply(f"no stored mesh {mesh_id!r}"))
        return room.blob_frame

    def _persist_saved(self, room: Room, now_ms: int) -> str | None:
        """Write the fresh saved slot; returns a failure message or None."""
        if self.store is None or room.state.saved is None:
            return None
        record = SnapshotRecord(room.room_id, now_ms, room.state.saved)
        try:
            self.store.store(record)
            return None
        except StoreError as exc:
            # the in-memory shared save still happened; only durability failed
            log.warning("room %s: persist failed: %s", room.room_id, exc)
            return f"save not persisted: {exc}"

    def _broadcast_hook(self, room: Room, envelope: Envelope, frame: bytes,
                        recipients: int) -> None:
        if self.on_broadcast is not None:
            self.on_broadcast(room, envelope, frame, recipients)
