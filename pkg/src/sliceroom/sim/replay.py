"""Replay a recorded envelope stream through a fresh replica.

Transcripts are what the simulator (or a debugging tap on the server)
writes: one canonical encoded envelope per line, in sequence order.
Replaying one is a regression check that the state machine still reaches
the same final state, reported as a digest.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..protocol import DecodeError, SharedState, decode_envelope

__all__ = ["ReplayError", "ReplayReport", "replay_transcript"]


class ReplayError(ValueError):
    """Transcript unusable; message names the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, slots=True)
class ReplayReport:
    envelope_count: int
    last_applied_seq: int
    state_digest: str

    def to_obj(self) -> dict:
        return {"envelope_count": self.envelope_count,
                "last_applied_seq": self.last_applied_seq,
                "state_digest": self.state_digest}


def replay_transcript(path: str) -> ReplayReport:
    """Apply every envelope in the file to a fresh SharedState.

    An empty file is a valid transcript of nothing and reports the
    default state's digest.
    """
    state = SharedState()
    count = 0
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                envelope = decode_envelope(line)
            except DecodeError as exc:
                raise ReplayError(str(exc), lineno) from exc
            state.apply(envelope)
            count += 1
    return ReplayReport(envelope_count=count,
                        last_applied_seq=state.last_applied_seq,
                        state_digest=state.digest())
