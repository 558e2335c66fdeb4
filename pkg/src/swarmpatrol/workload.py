"""Mission workload estimation from the event log.

Two estimators over the same append-only log of operator commands and
alarms, both yielding a 1-4 level:

* windowed: count events in the last few minutes and match the level
  criteria directly (several alarms > one alarm > any command > nothing);
* continuous: every event adds a fixed weight that then decays
  exponentially; the running sum is cut into levels by three thresholds.

Alarm criteria outrank command criteria in the windowed method because the
levels are ordered by severity and the top two are defined by alarms alone,
regardless of operator activity.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

WINDOWED = "windowed"
CONTINUOUS = "continuous"


class EventKind(str, enum.Enum):
    COMMAND = "command"
    ALARM = "alarm"


@dataclass(frozen=True)
class MissionEvent:
    tick: int
    kind: EventKind
    subject: str = ""  # vehicle id for commands, alarm id for alarms


@dataclass(frozen=True)
class WorkloadParams:
    window: int = 180  # "last few minutes" in ticks (1 tick = 1 s)
    w_cmd: float = 1.0
    w_alarm: float = 2.5
    half_life: float = 120.0
    thresholds: tuple[float, float, float] = (0.5, 2.0, 4.5)

    def __post_init__(self) -> None:
        if self.window <= 0:
            raise ValueError("window must be > 0")
        if self.w_cmd <= 0 or self.w_alarm <= 0:
            raise ValueError("event weights must be > 0")
        if self.half_life <= 0:
            raise ValueError("half_life must be > 0")
        t1, t2, t3 = self.thresholds
        if not t1 < t2 < t3:
            raise ValueError("thresholds must satisfy t1 < t2 < t3")

    def weight(self, kind: EventKind) -> float:
        return self.w_alarm if kind is EventKind.ALARM else self.w_cmd


@dataclass(frozen=True)
class WorkloadState:
    continuous_level: float
    discrete_level: int
    method: str

    def __post_init__(self) -> None:
        if self.discrete_level not in (1, 2, 3, 4):
            raise ValueError("discrete_level must be 1..4")
        if self.continuous_level < 0:
            raise ValueError("continuous_level must be >= 0")


def _check_ordered(log: Sequence[MissionEvent]) -> None:
    for earlier, later in zip(log, log[1:]):
        if later.tick < earlier.tick:
            raise ValueError("event log must be tick-ordered")


def classify_windowed(
    log: Sequence[MissionEvent], now: int, params: WorkloadParams | None = None
) -> WorkloadState:
    """Level from event counts in the window (now - W, now]."""
    params = params or WorkloadParams()
    _check_ordered(log)
    ticks = [e.tick for e in log]
    lo = bisect_right(ticks, now - params.window)
    hi = bisect_right(ticks, now)
    alarms = commands = 0
    for event in log[lo:hi]:
        if event.kind is EventKind.ALARM:
            alarms += 1
        else:
            commands += 1
    if alarms >= 2:
        level = 4
    elif alarms == 1:
        level = 3
    elif commands >= 1:
        level = 2
    else:
        level = 1
    return WorkloadState(float(level), level, WINDOWED)


def discrete_from_continuous(level: float, params: WorkloadParams) -> int:
    return 1 + sum(1 for t in params.thresholds if level >= t)


def level_continuous(
    log: Sequence[MissionEvent], now: int, params: WorkloadParams | None = None
) -> WorkloadState:
    """Discounted sum of event weights, halving every ``half_life`` ticks."""
    params = params or WorkloadParams()
    _check_ordered(log)
    total = 0.0
    for event in log:
        if event.tick > now:
            continue
        total += params.weight(event.kind) * math.pow(2.0, -(now - event.tick) / params.half_life)
    return WorkloadState(total, discrete_from_continuous(total, params), CONTINUOUS)


class WorkloadTracker:
    """Incremental continuous estimator: one running sum, rescaled per query.

    Exponential decay is closed under time shifts, so appending rescales the
    sum to the event's tick and adds the weight; queries rescale to "now".
    Kept oracle-equivalent to brute-force summation within 1e-9 relative.
    """

    def __init__(self, params: WorkloadParams | None = None) -> None:
        self.params = params or WorkloadParams()
        self._sum = 0.0
        self._at_tick = 0
        self._events: list[MissionEvent] = []

    @property
    def events(self) -> list[MissionEvent]:
        return self._events

    def append(self, event: MissionEvent) -> None:
        if self._events and event.tick < self._events[-1].tick:
            raise ValueError("events must be appended in tick order")
        self._sum = self._decayed(self._sum, self._at_tick, event.tick)
        self._sum += self.params.weight(event.kind)
        self._at_tick = event.tick
        self._events.append(event)

    def _decayed(self, value: float, from_tick: int, to_tick: int) -> float:
        if value == 0.0 or to_tick == from_tick:
            return value
        return value * math.pow(2.0, -(to_tick - from_tick) / self.params.half_life)

    def continuous(self, now: int) -> float:
        return self._decayed(self._sum, self._at_tick, now)

    def state(self, now: int, method: str = CONTINUOUS) -> WorkloadState:
        if method == CONTINUOUS:
            level = self.continuous(now)
            return WorkloadState(level, discrete_from_continuous(level, self.params), CONTINUOUS)
        if method == WINDOWED:
            return classify_windowed(self._events, now, self.params)
        raise ValueError(f"unknown workload method: {method!r}")


CANONICAL_SCENARIOS: tuple[tuple[str, tuple[EventKind, ...]], ...] = (
    ("quiet", ()),
    ("one_command", (EventKind.COMMAND,)),
    ("one_alarm", (EventKind.ALARM,)),
    ("two_alarms", (EventKind.ALARM, EventKind.ALARM)),
)


@dataclass(frozen=True)
class AgreementCase:
    scenario: str
    windowed_level: int
    continuous_level: int

    @property
    def agree(self) -> bool:
        return self.windowed_level == self.continuous_level


@dataclass(frozen=True)
class AgreementReport:
    cases: tuple[AgreementCase, ...]

    @property
    def all_agree(self) -> bool:
        return all(case.agree for case in self.cases)

    def disagreements(self) -> list[AgreementCase]:
        return [case for case in self.cases if not case.agree]


def calibrate_agreement(params: WorkloadParams | None = None) -> AgreementReport:
    """Check both methods on the four canonical fresh-burst scenarios.

    Each scenario drops its events at the query instant, so the discount
    factor is 1 and the check isolates weights against thresholds. Default
    parameters must agree on all four.
    """
    params = params or WorkloadParams()
    now = 1000
    cases = []
    for name, kinds in CANONICAL_SCENARIOS:
        log = [MissionEvent(now, kind, f"e{i}") for i, kind in enumerate(kinds)]
        cases.append(
            AgreementCase(
                name,
                classify_windowed(log, now, params).discrete_level,
                level_continuous(log, now, params).discrete_level,
            )
        )
    return AgreementReport(tuple(cases))
