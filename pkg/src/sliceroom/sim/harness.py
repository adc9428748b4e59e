"""Deterministic multi-peer session simulator.

Runs the real RoomManager and real SharedState replicas against an
in-process loopback transport with a virtual clock: simulated peers join
a room, emit seeded random gesture streams, and every frame crosses a
link model with configurable latency, optional reordering, and optional
duplication.  No wall-clock sleeps anywhere; identical (config, seed)
gives a bitwise-identical report.

Link semantics: latency and reordering apply in both directions.
Duplication applies only to server-to-client frames, the sequenced
direction where the seq-dedupe machinery absorbs copies; a client-to-
server frame is pre-sequence, so duplicating it would mean the gesture
genuinely happened twice rather than exercising idempotence (and a real
client speaks over a reliable stream anyway).
"""
from __future__ import annotations

import heapq
import itertools
import math
import random
from dataclasses import dataclass, field, fields

from ..geometry import Plane, Quaternion, RotationDelta, ScaleDelta, TwistDelta
from ..protocol import (
    Envelope,
    PlaneUpdate,
    SharedState,
    SnapshotRestore,
    SnapshotSave,
    Welcome,
    decode_frame,
    divergence,
    encode_envelope,
    encode_full_transform,
)
from ..server.rooms import RoomManager

__all__ = ["GestureMix", "LatencyModel", "ScenarioConfig", "ScenarioReport",
           "run_scenario"]

ROOM_ID = "sim"

# gesture magnitude ranges, chosen small like real per-frame gesture deltas
ROT_ANGLE = 0.25
TWIST_ANGLE = 0.4
SCALE_LOG = 0.22
PLANE_OFFSET = 8.0
SEND_GAP_MIN = 5.0
SEND_GAP_MAX = 30.0


@dataclass(frozen=True, slots=True)
class LatencyModel:
    min_ms: float = 0.0
    max_ms: float = 0.0
    reorder: bool = False
    duplicate_prob: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.min_ms <= self.max_ms):
            raise ValueError("latency needs 0 <= min_ms <= max_ms")
        if not (0.0 <= self.duplicate_prob < 1.0):
            # p = 1 would duplicate forever: the run could never quiesce
            raise ValueError("duplicate_prob must be in [0, 1)")


@dataclass(frozen=True, slots=True)
class GestureMix:
    """Relative weights for the random gesture stream."""
    rot: float = 4.0
    scale: float = 2.0
    twist: float = 2.0
    plane: float = 3.0
    save: float = 1.0
    restore: float = 1.0

    def __post_init__(self) -> None:
        weights = self.as_tuple()
        if any(w < 0 for w in weights):
            raise ValueError("gesture weights must be non-negative")
        if sum(weights) <= 0:
            raise ValueError("gesture weights must sum to a positive value")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in fields(self))


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    peer_count: int = 2
    message_count: int = 100  # total gestures across all peers
    seed: int = 0
    latency: LatencyModel = field(default_factory=LatencyModel)
    mix: GestureMix = field(default_factory=GestureMix)

    def __post_init__(self) -> None:
        if self.peer_count < 1:
            raise ValueError("peer_count must be at least 1")
        if self.message_count < 0:
            raise ValueError("message_count must be non-negative")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True, slots=True)
class ScenarioReport:
    """Everything the run measured; equality is exact, so a determinism
    check is simply report_a == report_b."""
    peer_count: int
    message_count: int
    seed: int
    divergence: float
    messages_sent: int       # client->server envelope frames (originals)
    messages_received: int   # envelope frames delivered to peers, dups included
    duplicates_delivered: int
    final_seq: int
    delta_bytes: int         # encoded transform-gesture envelopes as sent
    matrix_bytes: int        # the same gestures as full 4x4 transform frames
    convergence_ms: float    # quiescence time minus last client send time
    quiescent_at_ms: float   # virtual time at which the run went quiet
    state_digest: str        # authoritative replica digest at quiescence

    def to_obj(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_obj(cls, obj: dict) -> "ScenarioReport":
        return cls(**{f.name: obj[f.name] for f in fields(cls)})


class _Peer:
    def __init__(self, index: int, rng: random.Random, quota: int):
        self.index = index
        self.name = f"sim-{index}"
        self.rng = rng
        self.quota = quota
        self.peer_id: str | None = None
        self.replica: SharedState | None = None
        self.stash: list[bytes] = []  # frames that beat the welcome in

    def receive(self, data: bytes) -> None:
        if self.replica is None:
            frame = decode_frame(data)
            if isinstance(frame, Welcome):
                self.peer_id = frame.you
                self.replica = SharedState.from_welcome(frame)
                for early in self.stash:
                    self.replica.apply(decode_frame(early))
                self.stash.clear()
            else:
                self.stash.append(data)
            return
        frame = decode_frame(data)
        if isinstance(frame, Envelope):
            self.replica.apply(frame)


class _Link:
    """One direction of one peer's connection."""

    def __init__(self, model: LatencyModel, rng: random.Random):
        self.model = model
        self.rng = rng
        self.last_arrival = 0.0

    def arrival(self, now: float) -> float:
        t = now + self.rng.uniform(self.model.min_ms, self.model.max_ms)
        if not self.model.reorder:
            # reliable streams deliver in order; clamp to enforce FIFO
            t = max(t, self.last_arrival)
        self.last_arrival = max(self.last_arrival, t)
        return t

    def duplicates(self) -> int:
        n = 0
        while self.rng.random() < self.model.duplicate_prob:
            n += 1
        return n


def _distribute(total: int, buckets: int) -> list[int]:
    base, extra = divmod(total, buckets)
    return [base + (1 if i < extra else 0) for i in range(buckets)]


def _random_axis(rng: random.Random) -> tuple[float, float, float]:
    while True:
        x, y, z = rng.gauss(0, 1), rng.gauss(0, 1), rng.gauss(0, 1)
        n = math.sqrt(x * x + y * y + z * z)
        if n > 1e-6:
            return (x / n, y / n, z / n)


def run_scenario(config: ScenarioConfig,
                 transcript_path: str | None = None) -> ScenarioReport:
    """Run one scenario to quiescence and measure it.

    Optionally writes the sequenced broadcast stream, one encoded
    envelope per line, to transcript_path for later replay.
    """
    master = random.Random(config.seed)
    # all sub-generators derive from the master in a fixed order, so the
    # whole run is a pure function of (config, seed)
    link_rngs = [random.Random(master.getrandbits(64))
                 for _ in range(config.peer_count * 2)]
    peer_rngs = [random.Random(master.getrandbits(64))
                 for _ in range(config.peer_count)]

    quotas = _distribute(config.message_count, config.peer_count)
    peers = [_Peer(i, peer_rngs[i], quotas[i]) for i in range(config.peer_count)]
    uplinks = [_Link(config.latency, link_rngs[2 * i])
               for i in range(config.peer_count)]
    downlinks = [_Link(config.latency, link_rngs[2 * i + 1])
                 for i in range(config.peer_count)]

    manager = RoomManager(room_capacity=config.peer_count)
    counters = {"sent": 0, "received": 0, "dups": 0,
                "delta_bytes": 0, "matrix_bytes": 0}
    transcript: list[bytes] = []

    def on_broadcast(room, envelope, frame, recipients) -> None:
        transcript.append(frame)
        tag = type(envelope.payload).__name__
        if tag in ("RotationDelta", "ScaleDelta", "TwistDelta"):
            counters["delta_bytes"] += len(frame)
            counters["matrix_bytes"] += len(encode_full_transform(
                envelope.seq, envelope.sender_id, envelope.sent_at,
                room.state.model))
        elif tag == "PlaneUpdate":
            # the plane equation is full state under either design
            counters["delta_bytes"] += len(frame)
            counters["matrix_bytes"] += len(frame)

    manager.on_broadcast = on_broadcast

    events: list[tuple[float, int, object]] = []
    tie = itertools.count()
    last_send = 0.0

    def schedule(at: float, fn) -> None:
        heapq.heappush(events, (at, next(tie), fn))

    id_to_peer: dict[str, _Peer] = {}

    def deliver_down(peer: _Peer, data: bytes, now: float) -> None:
        link = downlinks[peer.index]
        # duplication applies to sequenced frames only: those are what the
        # seq-dedup machinery exists for (a duplicate welcome is inert)
        is_envelope = not data.startswith(b'{"control"')
        copies = 1 + (link.duplicates() if is_envelope else 0)
        for copy in range(copies):
            at = link.arrival(now)
            if copy > 0:
                counters["dups"] += 1

            def rx(data=data, peer=peer, is_envelope=is_envelope) -> None:
                if is_envelope:
                    counters["received"] += 1
                had_replica = peer.replica is not None
                peer.receive(data)
                if not had_replica and peer.replica is not None and peer.quota > 0:
                    # welcome is in; a client gestures only once it has state
                    gap = peer.rng.uniform(SEND_GAP_MIN, SEND_GAP_MAX)
                    schedule(_clock[0] + gap,
                             lambda peer=peer: send_gesture(peer, _clock[0]))

            schedule(at, rx)

    def route(deliveries, now: float) -> None:
        for peer_id, data in deliveries:
            deliver_down(id_to_peer[peer_id], data, now)

    def send_gesture(peer: _Peer, now: float) -> None:
        nonlocal last_send
        payload = _pick_gesture(peer)
        envelope = Envelope(0, peer.peer_id, int(now), payload)
        data = encode_envelope(envelope)
        counters["sent"] += 1
        last_send = max(last_send, now)
        at = uplinks[peer.index].arrival(now)

        def server_rx(data=data, peer=peer) -> None:
            out = manager.client_frame(ROOM_ID, peer.peer_id, data,
                                       int(_clock[0]))
            route(out, _clock[0])

        schedule(at, server_rx)
        peer.quota -= 1
        if peer.quota > 0:
            gap = peer.rng.uniform(SEND_GAP_MIN, SEND_GAP_MAX)
            schedule(now + gap, lambda: send_gesture(peer, _clock[0]))

    def _pick_gesture(peer: _Peer):
        mix = config.mix
        rng = peer.rng
        name = rng.choices(mix.names(), weights=mix.as_tuple())[0]
        replica = peer.replica
        if name == "restore" and replica.saved is None:
            name = "save"  # nothing saved yet; make later restores meaningful
        if name == "rot":
            return RotationDelta(Quaternion.from_axis_angle(
                _random_axis(rng), rng.uniform(-ROT_ANGLE, ROT_ANGLE)))
        if name == "scale":
            return ScaleDelta(math.exp(rng.uniform(-SCALE_LOG, SCALE_LOG)))
        if name == "twist":
            return TwistDelta(rng.uniform(-TWIST_ANGLE, TWIST_ANGLE),
                              _random_axis(rng))
        if name == "plane":
            # local plane math, full equation on the wire
            plane = replica.model.plane
            if rng.random() < 0.5:
                dq = Quaternion.from_axis_angle(
                    _random_axis(rng), rng.uniform(-ROT_ANGLE, ROT_ANGLE))
                return PlaneUpdate(plane.rotated(dq))
            return PlaneUpdate(plane.offset(rng.uniform(-PLANE_OFFSET,
                                                        PLANE_OFFSET)))
        if name == "save":
            return SnapshotSave()
        return SnapshotRestore(replica.saved)

    def connect(peer: _Peer, now: float) -> None:
        nonlocal last_send
        result = manager.join(ROOM_ID, peer.name, int(now))
        assert result.accepted, "sim room never refuses its own peers"
        peer.peer_id = result.peer_id
        id_to_peer[result.peer_id] = peer
        last_send = max(last_send, now)
        route(result.deliveries, now)

    # mutable cell so closures read the current virtual time
    _clock = [0.0]
    for i, peer in enumerate(peers):
        schedule(float(i), lambda peer=peer: connect(peer, _clock[0]))

    while events:
        at, _, fn = heapq.heappop(events)
        _clock[0] = at
        fn()

    room = manager.rooms[ROOM_ID]
    worst = 0.0
    for peer in peers:
        worst = max(worst, divergence(peer.replica, room.state))

    if transcript_path is not None:
        with open(transcript_path, "wb") as fh:
            for line in transcript:
                fh.write(line)
                fh.write(b"\n")

    return ScenarioReport(
        peer_count=config.peer_count,
        message_count=config.message_count,
        seed=config.seed,
        divergence=worst,
        messages_sent=counters["sent"],
        messages_received=counters["received"],
        duplicates_delivered=counters["dups"],
        final_seq=room.state.last_applied_seq,
        delta_bytes=counters["delta_bytes"],
        matrix_bytes=counters["matrix_bytes"],
        convergence_ms=_clock[0] - last_send,
        quiescent_at_ms=_clock[0],
        state_digest=room.state.digest(),
    )
