"""Mission runtime, protocol, scenario loading, metrics, service, CLI."""

from swarmpatrol.gateway.runtime import (
    Inbound,
    LogEntry,
    MissionRuntime,
    ReplayReport,
    RunResult,
    replay,
    run_headless,
)
from swarmpatrol.gateway.scenario import Scenario, ScenarioError, load_scenario, parse_scenario

__all__ = [
    "Inbound",
    "LogEntry",
    "MissionRuntime",
    "ReplayReport",
    "RunResult",
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "parse_scenario",
    "replay",
    "run_headless",
]
