"""Durable single-slot snapshot persistence, one file per room.

Records are written in the same canonical text format as the wire
snapshot body, so there is exactly one number encoding to keep exact:
decode(encode(record)) preserves every bit.  Writes are atomic
(write-temp then rename), and a second store for the same room simply
overwrites the slot.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from pathlib import Path

from .protocol import DecodeError, Snapshot, snapshot_from_obj, snapshot_to_obj

__all__ = ["CorruptRecordError", "SnapshotRecord", "SnapshotStore", "StoreError"]

# room ids double as file names, so keep them to a safe charset
ROOM_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9_.-]{0,63}\Z")

RECORD_SUFFIX = ".snapshot"


class StoreError(Exception):
    """Storage unavailable or refused; surfaced to the peer as a failed save."""


class CorruptRecordError(StoreError):
    """The file exists but does not parse as a snapshot record."""


@dataclass(frozen=True, slots=True)
class SnapshotRecord:
    room_id: str
    saved_at: int  # milliseconds since epoch
    snapshot: Snapshot

    def __post_init__(self) -> None:
        if not ROOM_ID_RE.match(self.room_id):
            raise ValueError(f"invalid room id {self.room_id!r}")
        if not isinstance(self.saved_at, int) or self.saved_at < 0:
            raise ValueError("saved_at must be a non-negative integer")


class SnapshotStore:
    """File-per-room store under a root directory.

    Per-room calls are expected to be serialized by the caller (the
    server already orders everything per room); concurrent access to
    distinct rooms is safe.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path_for(self, room_id: str) -> Path:
        if not ROOM_ID_RE.match(room_id):
            raise StoreError(f"invalid room id {room_id!r}")
        return self.root / f"{room_id}{RECORD_SUFFIX}"

    def store(self, record: SnapshotRecord) -> Path:
        """Durably write the room's single slot; returns the stored path."""
        path = self.path_for(record.room_id)
        obj = {"room": record.room_id, "saved_at": record.saved_at,
               "snapshot": snapshot_to_obj(record.snapshot)}
        text = json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n"
        tmp = path.with_name(path.name + ".tmp")
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            tmp.write_text(text, encoding="utf-8")
            os.replace(tmp, path)
        except OSError as exc:
            try:
                tmp.unlink(missing_ok=True)
            except OSError:
                pass
            raise StoreError(f"failed to save snapshot for {record.room_id!r}: {exc}") from exc
        return path

    def load(self, room_id: str) -> SnapshotRecord | None:
        """Latest record for the room, or None if never saved."""
        path = self.path_for(room_id)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        except OSError as exc:
            raise StoreError(f"failed to read snapshot for {room_id!r}: {exc}") from exc
        try:
            obj = json.loads(text)
            if not isinstance(obj, dict) or set(obj) != {"room", "saved_at", "snapshot"}:
                raise CorruptRecordError(f"{path}: not a snapshot record")
            saved_at = obj["saved_at"]
            if isinstance(saved_at, bool) or not isinstance(saved_at, int):
                raise CorruptRecordError(f"{path}: saved_at must be an integer")
            return SnapshotRecord(room_id=room_id, saved_at=saved_at,
                                  snapshot=snapshot_from_obj(obj["snapshot"]))
        except CorruptRecordError:
            raise
        except (json.JSONDecodeError, DecodeError, ValueError) as exc:
            raise CorruptRecordError(f"{path}: {exc}") from exc

    def list_rooms(self) -> list[str]:
        """Rooms with a stored slot, sorted."""
        if not self.root.is_dir():
            return []
        rooms = []
        for entry in self.root.iterdir():
            name = entry.name
            if name.endswith(RECORD_SUFFIX) and entry.is_file():
                room_id = name[: -len(RECORD_SUFFIX)]
                if ROOM_ID_RE.match(room_id):
                    rooms.append(room_id)
        return sorted(rooms)

    def delete(self, room_id: str) -> bool:
        """Remove the room's slot; True if something was deleted."""
        path = self.path_for(room_id)
        try:
            path.unlink()
            return True
        except FileNotFoundError:
            return False
        except OSError as exc:
            raise StoreError(f"failed to delete snapshot for {room_id!r}: {exc}") from exc
