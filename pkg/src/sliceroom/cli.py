"""Command line entry points: serve, simulate, replay."""
from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys

from .server.rooms import DEFAULT_CAPACITY, RoomManager
from .sim import LatencyModel, ScenarioConfig, replay_transcript, run_scenario
from .store import SnapshotStore


def _parse_listen(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected <addr>:<port>")
    try:
        return host, int(port)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad port {port!r}") from None


def _parse_latency(value: str) -> tuple[float, float]:
    lo, sep, hi = value.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected <min_ms>:<max_ms>")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad latency range {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sliceroom",
        description="Shared 3D model sessions: relay server and simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the websocket relay server")
    serve.add_argument("--listen", type=_parse_listen, default=("0.0.0.0", 9464),
                       metavar="ADDR:PORT", help="bind address (default 0.0.0.0:9464)")
    serve.add_argument("--room-capacity", type=int, default=DEFAULT_CAPACITY,
                       metavar="N", help="max peers per room (default 16)")
    serve.add_argument("--log-level", default="info",
                       choices=["debug", "info", "warning", "error"])
    serve.add_argument("--persist-dir", metavar="PATH",
                       help="directory for saved snapshots (optional)")

    simulate = sub.add_parser("simulate", help="run a deterministic scenario")
    simulate.add_argument("--peers", type=int, default=2, metavar="N")
    simulate.add_argument("--messages", type=int, default=100, metavar="M",
                          help="total gestures across all peers")
    simulate.add_argument("--seed", type=int, default=0, metavar="S")
    simulate.add_argument("--latency", type=_parse_latency, default=(0.0, 0.0),
                          metavar="MIN:MAX", help="per-frame latency range in ms")
    simulate.add_argument("--reorder", action="store_true",
                          help="allow frames to overtake each other")
    simulate.add_argument("--dup-prob", type=float, default=0.0, metavar="P",
                          help="chance of duplicating each delivered frame")
    simulate.add_argument("--report", metavar="PATH",
                          help="also write the report as JSON")
    simulate.add_argument("--transcript", metavar="PATH",
                          help="record the sequenced envelope stream")

    replay = sub.add_parser("replay", help="re-apply a recorded envelope stream")
    replay.add_argument("--transcript", required=True, metavar="PATH")
    return parser


def _cmd_serve(args) -> int:
    logging.basicConfig(level=args.log_level.upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    store = SnapshotStore(args.persist_dir) if args.persist_dir else None
    manager = RoomManager(room_capacity=args.room_capacity, store=store)
    host, port = args.listen
    from .server.ws import run_server
    try:
        asyncio.run(run_server(host, port, manager))
    except KeyboardInterrupt:
        pass
    return 0


def _cmd_simulate(args) -> int:
    lo, hi = args.latency
    try:
        config = ScenarioConfig(
            peer_count=args.peers, message_count=args.messages, seed=args.seed,
            latency=LatencyModel(lo, hi, reorder=args.reorder,
                                 duplicate_prob=args.dup_prob))
    except ValueError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return 2
    report = run_scenario(config, transcript_path=args.transcript)
    print(f"peers {report.peer_count}, gestures {report.message_count}, "
          f"seed {report.seed}")
    print(f"final seq {report.final_seq}; "
          f"sent {report.messages_sent}, delivered {report.messages_received} "
          f"({report.duplicates_delivered} duplicates)")
    print(f"divergence {report.divergence:.3e}")
    print(f"delta bytes {report.delta_bytes} vs full-matrix bytes "
          f"{report.matrix_bytes} "
          f"({100.0 * report.delta_bytes / report.matrix_bytes:.1f}%)"
          if report.matrix_bytes else "no transform gestures")
    print(f"quiescent at {report.quiescent_at_ms:.1f} virtual ms "
          f"(+{report.convergence_ms:.1f} after last send)")
    print(f"state digest {report.state_digest}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_obj(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if report.divergence == 0.0 or report.divergence <= 1e-9 else 1


def _cmd_replay(args) -> int:
    from .sim.replay import ReplayError
    try:
        report = replay_transcript(args.transcript)
    except (OSError, ReplayError) as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return 2
    print(f"envelopes {report.envelope_count}, "
          f"last seq {report.last_applied_seq}")
    print(f"state digest {report.state_digest}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "simulate":
        return _cmd_simulate(args)
    return _cmd_replay(args)


if __name__ == "__main__":
    sys.exit(main())
