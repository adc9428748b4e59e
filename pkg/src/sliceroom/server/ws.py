"""Websocket front end for the room relay.

One websocket connection = one peer in one room.  Clients connect to
``/ws?room=<id>&name=<display name>``; every websocket frame in either
direction is exactly one encoded wire frame.  Plain HTTP GETs on
``/health`` (text status line) and ``/lobby`` (room list as JSON) are
answered during the handshake without upgrading.

All frame handling runs on the event loop with no awaits between decode
and state change, which serializes every room for free.  Outbound frames
go through a per-connection queue drained by a writer task, because a
connection's send side must not be used concurrently.
"""
from __future__ import annotations

import asyncio
import http
import json
import logging
import time
import urllib.parse

from websockets.asyncio.server import ServerConnection, serve
from websockets.exceptions import ConnectionClosed

from ..protocol import Refused, encode_control
from .rooms import RoomManager

__all__ = ["SessionServer", "run_server"]

log = logging.getLogger("sliceroom.server")

MAX_FRAME_BYTES = 32 * 1024 * 1024  # inline mesh imports are the big ones

_CLOSE = object()  # queue sentinel


def _now_ms() -> int:
    return int(time.time() * 1000)


class SessionServer:
    """Owns the RoomManager and the per-connection outbound queues."""

    def __init__(self, manager: RoomManager):
        self.manager = manager
        self._queues: dict[tuple[str, str], asyncio.Queue] = {}

    # -- outbound plumbing --------------------------------------------------

    def _dispatch(self, room_id: str, deliveries) -> None:
        for peer_id, frame in deliveries:
            queue = self._queues.get((room_id, peer_id))
            if queue is not None:
                queue.put_nowait(frame)

    async def _writer(self, ws: ServerConnection, queue: asyncio.Queue) -> None:
        while True:
            frame = await queue.get()
            if frame is _CLOSE:
                return
            try:
                await ws.send(frame)
            except ConnectionClosed:
                return

    # -- HTTP (no websocket upgrade) ----------------------------------------

    def process_request(self, connection: ServerConnection, request):
        path = urllib.parse.urlsplit(request.path).path
        if path == "/health":
            rooms, members = self.manager.stats()
            return connection.respond(
                http.HTTPStatus.OK, f"ok rooms={rooms} members={members}\n")
        if path == "/lobby":
            lobby = self.manager.lobby_list(_now_ms())
            body = json.dumps([[room_id, count] for room_id, count in lobby])
            response = connection.respond(http.HTTPStatus.OK, body + "\n")
            response.headers["Content-Type"] = "application/json"
            return response
        if path == "/ws":
            return None  # proceed with the websocket handshake
        return connection.respond(http.HTTPStatus.NOT_FOUND, "not found\n")

    # -- websocket lifecycle ------------------------------------------------

    async def handle(self, ws: ServerConnection) -> None:
        query = urllib.parse.parse_qs(urllib.parse.urlsplit(ws.request.path).query)
        room_id = (query.get("room") or [""])[0]
        name = (query.get("name") or [""])[0]
        if not room_id:
            await ws.send(encode_control(Refused("missing room parameter")))
            await ws.close()
            return

        result = self.manager.join(room_id, name, _now_ms())
        if not result.accepted:
            for _, frame in result.deliveries:
                await ws.send(frame)
            await ws.close()
            return
        peer_id = result.peer_id

        queue: asyncio.Queue = asyncio.Queue()
        self._queues[(room_id, peer_id)] = queue
        writer = asyncio.create_task(self._writer(ws, queue))
        # queue up our own welcome before fanning out the join
        self._dispatch(room_id, result.deliveries)
        try:
            async for message in ws:
                if isinstance(message, str):
                    message = message.encode("utf-8")
                out = self.manager.client_frame(room_id, peer_id, message,
                                               _now_ms())
                self._dispatch(room_id, out)
        except ConnectionClosed:
            pass
        finally:
            del self._queues[(room_id, peer_id)]
            self._dispatch(room_id,
                           self.manager.disconnect(room_id, peer_id, _now_ms()))
            queue.put_nowait(_CLOSE)
            try:
                await writer
            except asyncio.CancelledError:
                pass


async def run_server(host: str, port: int, manager: RoomManager,
                     ready: asyncio.Event | None = None) -> None:
    """Serve until cancelled.  `ready` fires once the socket is listening."""
    session = SessionServer(manager)
    async with serve(session.handle, host, port,
                     process_request=session.process_request,
                     max_size=MAX_FRAME_BYTES) as server:
        if ready is not None:
            ready.set()
        log.info("listening on %s:%d", host, port)
        await server.serve_forever()
