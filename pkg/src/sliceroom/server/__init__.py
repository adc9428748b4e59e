"""Room relay: transport-independent logic plus the websocket front end."""
from .rooms import DEFAULT_CAPACITY, DEFAULT_GRACE_MS, JoinResult, Room, RoomManager

__all__ = ["DEFAULT_CAPACITY", "DEFAULT_GRACE_MS", "JoinResult", "Room",
           "RoomManager"]
