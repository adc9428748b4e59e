"""Live websocket relay: real sockets against an in-process server.

Every test spins the server on an ephemeral port inside asyncio.run.
Plain-HTTP endpoints are fetched via asyncio.to_thread because urllib
would otherwise block the very loop the server runs on.
"""
import asyncio
import json
import socket
import urllib.error
import urllib.request

import pytest
import websockets

from sliceroom.geometry import RotationDelta, ScaleDelta, Quaternion
from sliceroom.protocol import (
    Envelope,
    ErrorReply,
    Refused,
    SharedState,
    Welcome,
    decode_frame,
    divergence,
    encode_envelope,
)
from sliceroom.server import RoomManager
from sliceroom.server.ws import run_server

HOST = "127.0.0.1"


def free_port() -> int:
    with socket.socket() as s:
        s.bind((HOST, 0))
        return s.getsockname()[1]


async def with_server(manager, inner):
    """Run `inner(port)` while the server is listening."""
    port = free_port()
    ready = asyncio.Event()
    task = asyncio.create_task(run_server(HOST, port, manager, ready))
    await asyncio.wait_for(ready.wait(), 5)
    try:
        return await asyncio.wait_for(inner(port), 30)
    finally:
        task.cancel()
        try:
            await task
        except asyncio.CancelledError:
            pass


def ws_url(port, room="demo", name="x"):
    return f"ws://{HOST}:{port}/ws?room={room}&name={name}"


def gesture(payload) -> bytes:
    return encode_envelope(Envelope(seq=0, sender_id="c", sent_at=0,
                                    payload=payload))


async def recv_frame(ws):
    data = await asyncio.wait_for(ws.recv(), 10)
    return decode_frame(data if isinstance(data, bytes) else data.encode())


def fetch(url: str) -> str:
    with urllib.request.urlopen(url, timeout=5) as response:
        return response.read().decode()


def test_two_clients_converge_via_relay():
    async def scenario(port):
        async with websockets.connect(ws_url(port, name="alice")) as a, \
                   websockets.connect(ws_url(port, name="bob")) as b:
            wa = await recv_frame(a)
            assert isinstance(wa, Welcome)
            ra = SharedState.from_welcome(wa)
            wb = await recv_frame(b)
            rb = SharedState.from_welcome(wb)
            ra.apply(await recv_frame(a))  # bob's join reaches alice

            await a.send(gesture(ScaleDelta(2.0)))
            await b.send(gesture(RotationDelta(
                Quaternion.from_axis_angle((0.0, 1.0, 0.0), 0.5))))
            for _ in range(2):
                ra.apply(await recv_frame(a))
                rb.apply(await recv_frame(b))
            assert divergence(ra, rb) == 0.0
            assert ra.model.scale == 2.0
            return True

    manager = RoomManager()
    assert asyncio.run(with_server(manager, scenario))
    assert manager.rooms["demo"].state.model.scale == 2.0


def test_sender_echo_carries_assigned_seq():
    async def scenario(port):
        async with websockets.connect(ws_url(port)) as ws:
            welcome = await recv_frame(ws)
            assert welcome.last_seq == 1
            await ws.send(gesture(ScaleDelta(3.0)))
            echo = await recv_frame(ws)
            assert isinstance(echo, Envelope)
            assert echo.seq == 2
            assert echo.sender_id == welcome.you
            return True

    assert asyncio.run(with_server(RoomManager(), scenario))


def test_malformed_frame_gets_error_reply_and_connection_survives():
    async def scenario(port):
        async with websockets.connect(ws_url(port)) as ws:
            await recv_frame(ws)  # welcome
            await ws.send(b"totally not json")
            reply = await recv_frame(ws)
            assert isinstance(reply, ErrorReply)
            await ws.send(gesture(ScaleDelta(2.0)))
            echo = await recv_frame(ws)
            assert isinstance(echo, Envelope)
            return True

    assert asyncio.run(with_server(RoomManager(), scenario))


def test_missing_room_parameter_refused():
    async def scenario(port):
        async with websockets.connect(f"ws://{HOST}:{port}/ws?name=x") as ws:
            reply = await recv_frame(ws)
            assert isinstance(reply, Refused)
            assert "room" in reply.reason
            return True

    assert asyncio.run(with_server(RoomManager(), scenario))


def test_capacity_refusal_over_socket():
    async def scenario(port):
        async with websockets.connect(ws_url(port, name="one")) as first:
            await recv_frame(first)
            async with websockets.connect(ws_url(port, name="two")) as second:
                reply = await recv_frame(second)
                assert isinstance(reply, Refused)
                assert "full" in reply.reason
            # the admitted client is unaffected
            await first.send(gesture(ScaleDelta(2.0)))
            echo = await recv_frame(first)
            assert isinstance(echo, Envelope)
            return True

    assert asyncio.run(with_server(RoomManager(room_capacity=1), scenario))


def test_disconnect_reaches_remaining_peer():
    async def scenario(port):
        async with websockets.connect(ws_url(port, name="stay")) as stay:
            await recv_frame(stay)
            leaver = await websockets.connect(ws_url(port, name="leave"))
            await recv_frame(leaver)
            join_env = await recv_frame(stay)
            assert isinstance(join_env, Envelope)
            await leaver.close()
            leave_env = await recv_frame(stay)
            assert isinstance(leave_env, Envelope)
            assert type(leave_env.payload).__name__ == "Leave"
            return True

    assert asyncio.run(with_server(RoomManager(), scenario))


def test_health_endpoint_reports_counts():
    async def scenario(port):
        line = await asyncio.to_thread(fetch, f"http://{HOST}:{port}/health")
        assert line == "ok rooms=0 members=0\n"
        async with websockets.connect(ws_url(port)) as ws:
            await recv_frame(ws)
            line = await asyncio.to_thread(fetch, f"http://{HOST}:{port}/health")
            assert line == "ok rooms=1 members=1\n"
        return True

    assert asyncio.run(with_server(RoomManager(), scenario))


def test_lobby_endpoint_lists_rooms():
    async def scenario(port):
        async with websockets.connect(ws_url(port, room="apple")) as a, \
                   websockets.connect(ws_url(port, room="pear")) as b:
            await recv_frame(a)
            await recv_frame(b)
            body = await asyncio.to_thread(fetch, f"http://{HOST}:{port}/lobby")
            assert json.loads(body) == [["apple", 1], ["pear", 1]]
        return True

    assert asyncio.run(with_server(RoomManager(), scenario))


def test_unknown_http_path_is_404():
    async def scenario(port):
        def probe():
            try:
                urllib.request.urlopen(f"http://{HOST}:{port}/nope", timeout=5)
            except urllib.error.HTTPError as exc:
                return exc.code
            return None

        assert await asyncio.to_thread(probe) == 404
        return True

    assert asyncio.run(with_server(RoomManager(), scenario))
