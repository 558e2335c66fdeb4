"""What an utterance is interpreted against: world view, grounding, scoring."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from swarmpatrol.missions import BeaconRegistry, ModeTable
from swarmpatrol.swarm import Alarm, SearchZone, Vehicle

Point = tuple[float, float]


@dataclass(frozen=True)
class Gesture:
    """Pre-tokenized map input: a click point or a drag segment."""

    kind: str  # "click" | "drag"
    x: float
    y: float
    x2: Optional[float] = None
    y2: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in ("click", "drag"):
            raise ValueError(f"unknown gesture kind {self.kind!r}")
        if self.kind == "drag" and (self.x2 is None or self.y2 is None):
            raise ValueError("drag gesture needs both endpoints")

    def point(self) -> Point:
        return self.x, self.y


@dataclass(frozen=True)
class OperatorUtterance:
    text: str
    tick: int
    gesture: Optional[Gesture] = None
    cid: Optional[str] = None  # client correlation id

    def __post_init__(self) -> None:
        if not self.text or not self.text.strip():
            raise ValueError("utterance text must be non-empty")


@dataclass(frozen=True)
class GroundingRecord:
    """One settled exchange: what was said, how it was read, how it ended."""

    tick: int
    text: str
    intent: Optional[str]
    resolution: str  # "executed" | "clarified" | "abandoned"
    rounds: int = 0
    strategy: str = ""
    vehicle_ids: tuple[str, ...] = ()
    labels: tuple[str, ...] = ()  # zone/beacon labels that took part
    location: Optional[Point] = None


@dataclass(frozen=True)
class ScoringParams:
    """Weights for candidate ranking under contextual interpretation."""

    w_label: float = 0.5
    w_proximity: float = 0.3
    w_recency: float = 0.2
    dominance_margin: float = 0.2  # normalized score gap needed to auto-pick
    proximity_scale: float = 200.0  # meters at which proximity halves
    recency_depth: int = 10  # grounding records considered "recent"


@dataclass
class DialogueContext:
    """Snapshot the interpreter resolves referents against."""

    vehicles: dict[str, Vehicle]
    zones: dict[str, SearchZone]
    beacons: BeaconRegistry
    alarms: list[Alarm]
    now: int
    recency_window: int
    blocked: np.ndarray
    cell_size: float
    map_width: float
    map_height: float
    grounding: list[GroundingRecord] = field(default_factory=list)
    mode_table: Optional[ModeTable] = None
    scoring: ScoringParams = field(default_factory=ScoringParams)

    def zone_by_label(self, label: str) -> Optional[SearchZone]:
        label = label.lower()
        for zone in self.zones.values():
            if zone.label.lower() == label:
                return zone
        return None

    def recent_alarm(self) -> Optional[Alarm]:
        for alarm in reversed(self.alarms):
            if alarm.is_recent(self.now, self.recency_window):
                return alarm
        return None

    def recent_grounding(self) -> list[GroundingRecord]:
        return self.grounding[-self.scoring.recency_depth :]
