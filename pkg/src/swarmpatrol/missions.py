"""Authority sharing: operating-mode tables over OODA stages, plus beacons.

Each task crosses the four OODA stages; every (task, stage) cell offers one
or more operating modes (who does the work: operator, system, or system
with operator veto) and exactly one mode is active per cell at all times.
Who may *select* the active mode is the second authority level: a static
per-cell policy. Requests from the side without selection authority are
recorded as proposals instead of applied, so the audit trail keeps both.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional


class Stage(str, enum.Enum):
    OBSERVE = "observe"
    ORIENT = "orient"
    DECIDE = "decide"
    ACT = "act"


class Authority(str, enum.Enum):
    OPERATOR_ONLY = "operator_only"  # full manual
    SYSTEM_ONLY = "system_only"  # full auto
    SYSTEM_WITH_VETO = "system_with_veto"  # auto unless the operator steps in


class Requester(str, enum.Enum):
    OPERATOR = "operator"
    SYSTEM = "system"


class SelectionPolicy(str, enum.Enum):
    OPERATOR_SELECTS = "operator_selects"
    SYSTEM_SELECTS = "system_selects"
    EITHER_OPERATOR_PRIORITY = "either_operator_priority"


@dataclass(frozen=True)
class OperatingMode:
    id: str
    stage: Stage
    authority: Authority
    description: str = ""


@dataclass(frozen=True)
class ModeChange:
    tick: int
    task: str
    stage: Stage
    mode_id: str
    requester: Requester
    applied: bool  # False = recorded as a proposal only


@dataclass(frozen=True)
class Violation:
    task: str
    stage: Stage
    problem: str


class ModeTableError(ValueError):
    """Unknown cell or mode, or a structurally broken table."""


CellKey = tuple[str, Stage]


class ModeTable:
    """Tasks x OODA stages, each cell holding its modes and the active one."""

    def __init__(self) -> None:
        self.cells: dict[CellKey, list[OperatingMode]] = {}
        self.active: dict[CellKey, str] = {}
        self.selection: dict[CellKey, SelectionPolicy] = {}
        self.last_set_by: dict[CellKey, Optional[Requester]] = {}
        self.change_log: list[ModeChange] = []

    @property
    def tasks(self) -> list[str]:
        seen: dict[str, None] = {}
        for task, _ in self.cells:
            seen.setdefault(task)
        return list(seen)

    def add_cell(
        self,
        task: str,
        stage: Stage,
        modes: Iterable[OperatingMode],
        active: str | None = None,
        selection: SelectionPolicy = SelectionPolicy.EITHER_OPERATOR_PRIORITY,
    ) -> None:
        modes = list(modes)
        if not modes:
            raise ModeTableError(f"cell ({task}, {stage.value}) must offer at least one mode")
        ids = [m.id for m in modes]
        if len(set(ids)) != len(ids):
            raise ModeTableError(f"duplicate mode ids in cell ({task}, {stage.value})")
        key = (task, stage)
        self.cells[key] = modes
        self.active[key] = active if active is not None else ids[0]
        if self.active[key] not in ids:
            raise ModeTableError(f"active mode {active!r} not offered by cell {key}")
        self.selection[key] = selection
        self.last_set_by[key] = None

    def modes_of(self, task: str, stage: Stage) -> list[OperatingMode]:
        try:
            return self.cells[(task, stage)]
        except KeyError:
            raise ModeTableError(f"unknown cell ({task}, {stage.value})") from None

    def _may_apply(self, key: CellKey, requester: Requester) -> bool:
        policy = self.selection[key]
        if policy is SelectionPolicy.OPERATOR_SELECTS:
            return requester is Requester.OPERATOR
        if policy is SelectionPolicy.SYSTEM_SELECTS:
            return requester is Requester.SYSTEM
        # Either side may select, but an explicit operator choice sticks until
        # the operator moves it again.
        if requester is Requester.SYSTEM and self.last_set_by[key] is Requester.OPERATOR:
            return False
        return True

    def activate_mode(
        self, task: str, stage: Stage, mode_id: str, requester: Requester, tick: int = 0
    ) -> ModeChange | None:
        """Apply or propose a mode selection; returns the logged change.

        Unknown cells or modes raise without touching anything. Re-selecting
        the already-active mode by an authorized requester is a silent no-op.
        """
        key = (task, stage)
        modes = self.modes_of(task, stage)
        if mode_id not in {m.id for m in modes}:
            raise ModeTableError(f"mode {mode_id!r} not offered by cell ({task}, {stage.value})")
        if self._may_apply(key, requester):
            if self.active[key] == mode_id:
                return None
            self.active[key] = mode_id
            self.last_set_by[key] = requester
            change = ModeChange(tick, task, stage, mode_id, requester, applied=True)
        else:
            change = ModeChange(tick, task, stage, mode_id, requester, applied=False)
        self.change_log.append(change)
        return change

    def validate(self) -> list[Violation]:
        """Empty iff every cell has an active mode drawn from its own list."""
        violations = []
        for key, modes in self.cells.items():
            task, stage = key
            active = self.active.get(key)
            if active is None:
                violations.append(Violation(task, stage, "no active mode"))
            elif active not in {m.id for m in modes}:
                violations.append(Violation(task, stage, f"active mode {active!r} not in cell"))
        return violations

    def to_payload(self) -> dict:
        """JSON-ready structure for snapshots and the console panel."""
        return {
            "tasks": self.tasks,
            "cells": [
                {
                    "task": task,
                    "stage": stage.value,
                    "modes": [
                        {"id": m.id, "authority": m.authority.value, "description": m.description}
                        for m in modes
                    ],
                    "active": self.active[(task, stage)],
                    "selection": self.selection[(task, stage)].value,
                }
                for (task, stage), modes in self.cells.items()
            ],
        }


def default_mode_table() -> ModeTable:
    """Three tasks x four stages with a mixed mode inventory.

    Act stages get the full manual / full auto / auto-with-veto trio; upstream
    stages get one or two. Display configuration stays operator-selected.
    """
    table = ModeTable()

    def mode(mid: str, stage: Stage, authority: Authority, desc: str) -> OperatingMode:
        return OperatingMode(mid, stage, authority, desc)

    for task in ("patrol", "pursuit"):
        table.add_cell(task, Stage.OBSERVE, [
            mode(f"{task}-observe-auto", Stage.OBSERVE, Authority.SYSTEM_ONLY, "sensor sweep"),
        ], selection=SelectionPolicy.SYSTEM_SELECTS)
        table.add_cell(task, Stage.ORIENT, [
            mode(f"{task}-orient-auto", Stage.ORIENT, Authority.SYSTEM_ONLY, "fused picture"),
            mode(f"{task}-orient-manual", Stage.ORIENT, Authority.OPERATOR_ONLY, "raw feeds"),
        ])
        table.add_cell(task, Stage.DECIDE, [
            mode(f"{task}-decide-auto", Stage.DECIDE, Authority.SYSTEM_WITH_VETO, "suggested tasking"),
            mode(f"{task}-decide-manual", Stage.DECIDE, Authority.OPERATOR_ONLY, "operator tasking"),
        ])
        table.add_cell(task, Stage.ACT, [
            mode(f"{task}-act-auto", Stage.ACT, Authority.SYSTEM_ONLY, "full auto"),
            mode(f"{task}-act-veto", Stage.ACT, Authority.SYSTEM_WITH_VETO, "auto with veto"),
            mode(f"{task}-act-manual", Stage.ACT, Authority.OPERATOR_ONLY, "full manual"),
        ], active=f"{task}-act-veto")

    for stage in Stage:
        table.add_cell("display", stage, [
            mode(f"display-{stage.value}-default", stage, Authority.SYSTEM_WITH_VETO, "preset layout"),
            mode(f"display-{stage.value}-custom", stage, Authority.OPERATOR_ONLY, "operator layout"),
        ], selection=SelectionPolicy.OPERATOR_SELECTS)
    return table


# -- beacons ------------------------------------------------------------------


@dataclass(frozen=True)
class Beacon:
    id: str
    x: float
    y: float
    label: str


class BeaconError(ValueError):
    """Out-of-bounds position or ambiguous label."""


class BeaconRegistry:
    """Named map points the operator can reference in commands."""

    def __init__(self, map_width: float, map_height: float) -> None:
        self.map_width = map_width
        self.map_height = map_height
        self._by_id: dict[str, Beacon] = {}
        self._counter = itertools.count(1)

    def place(self, x: float, y: float, label: str) -> Beacon:
        if not (0 <= x <= self.map_width and 0 <= y <= self.map_height):
            raise BeaconError(f"beacon position off the map: ({x:.0f}, {y:.0f})")
        label = label.strip()
        if not label:
            raise BeaconError("beacon label must be non-empty")
        if self.by_label(label) is not None:
            raise BeaconError(f"beacon label {label!r} already in use")
        beacon = Beacon(f"b{next(self._counter)}", x, y, label)
        self._by_id[beacon.id] = beacon
        return beacon

    def by_id(self, beacon_id: str) -> Optional[Beacon]:
        return self._by_id.get(beacon_id)

    def by_label(self, label: str) -> Optional[Beacon]:
        label = label.strip().lower()
        for beacon in self._by_id.values():
            if beacon.label.lower() == label:
                return beacon
        return None

    def all(self) -> list[Beacon]:
        return list(self._by_id.values())
