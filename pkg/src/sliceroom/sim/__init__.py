"""Deterministic multi-peer simulation and transcript replay."""
from .harness import (
    GestureMix,
    LatencyModel,
    ScenarioConfig,
    ScenarioReport,
    run_scenario,
)
from .replay import ReplayError, ReplayReport, replay_transcript

__all__ = ["GestureMix", "LatencyModel", "ReplayError", "ReplayReport",
           "ScenarioConfig", "ScenarioReport", "run_scenario",
           "replay_transcript"]
