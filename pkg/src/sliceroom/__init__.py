"""Shared 3D model co-viewing: geometry core, wire protocol, relay server,
persistence, and a deterministic multi-peer simulator."""

__version__ = "0.1.0"
