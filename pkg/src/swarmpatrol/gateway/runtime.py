"""The mission runtime: one tick loop owning all state.

Per tick: advance the world (field dynamics, vehicles, intruders,
detections), apply scripted scenario events due this tick, then drain the
serialized inbound queue (operator utterances, completion responses, raw
commands, mode requests) so their effects start next tick. Everything that
happened is appended to the JSON-lines mission log; identical scenario and
seed reproduce a byte-identical log, which is what replay checks.

Log categories: init, mission_event, grounding, mode_change, anomaly,
coverage, digest. Coverage and digest records are runtime plumbing on top
of the four domain categories and exist so that metrics and replay work
from the log alone.
"""

from __future__ import annotations

import hashlib
import json
import struct
from collections import deque
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from swarmpatrol.dialogue import (
    DialogueContext,
    DialogueSession,
    Emission,
    GatewayAction,
    GenStrategy,
    Gesture,
    OperatorUtterance,
    Severity,
    StrategyPolicy,
    decide_emission,
    default_policy,
    select_strategy,
)
from swarmpatrol.gateway import protocol
from swarmpatrol.gateway.metrics import MetricsCollector, WorkloadTraceRow
from swarmpatrol.gateway.scenario import Scenario, build_world
from swarmpatrol.missions import (
    BeaconError,
    BeaconRegistry,
    ModeTable,
    ModeTableError,
    Requester,
    Stage,
    default_mode_table,
)
from swarmpatrol.swarm import (
    Alarm,
    DispatchError,
    GotoCommand,
    PursueCommand,
    SearchZone,
    VehicleCommand,
)
from swarmpatrol.workload import (
    CONTINUOUS,
    WINDOWED,
    EventKind,
    MissionEvent,
    WorkloadParams,
    WorkloadState,
    WorkloadTracker,
)

LOG_VERSION = 1


@dataclass(frozen=True)
class LogEntry:
    tick: int
    category: str  # init | mission_event | grounding | mode_change | anomaly | coverage | digest
    body: dict

    def to_json(self) -> str:
        return json.dumps(
            {"tick": self.tick, "category": self.category, "body": self.body},
            sort_keys=True,
            separators=(",", ":"),
        )


@dataclass
class Inbound:
    """One frame-shaped item waiting in the command queue."""

    kind: str  # utterance | completion_response | command | mode_change
    payload: dict
    cid: Optional[str] = None


@dataclass
class TickOutput:
    """What one tick wants to tell connected clients."""

    tick: int
    events: list[dict] = dc_field(default_factory=list)  # event-frame payloads
    emissions: list[dict] = dc_field(default_factory=list)  # emission-frame payloads
    requests: list[dict] = dc_field(default_factory=list)  # completion requests
    mode_changes: list[dict] = dc_field(default_factory=list)
    errors: list[dict] = dc_field(default_factory=list)


class MissionRuntime:
    def __init__(
        self,
        scenario: Scenario,
        seed: int,
        policy: StrategyPolicy | None = None,
    ) -> None:
        self.scenario = scenario
        self.seed = seed
        self.world = build_world(scenario, seed)
        self.beacons = BeaconRegistry(self.world.map_width, self.world.map_height)
        for b in scenario.beacons:
            self.beacons.place(float(b["x"]), float(b["y"]), b["label"])
        self.mode_table: ModeTable = default_mode_table()
        self.workload_params = WorkloadParams(**scenario.workload_kwargs)
        self.tracker = WorkloadTracker(self.workload_params)
        self.session = DialogueSession(policy or default_policy())
        self.options = scenario.options
        self.metrics = MetricsCollector(
            n_cells=self.world.field.width * self.world.field.height,
            target=self.options.coverage_target,
        )
        self.log: list[LogEntry] = []
        self.queue: deque[Inbound] = deque()
        self._zone_counter = 0
        self._known_anomalies: set[frozenset] = set()
        self._last_level = 1
        self.current_strategy = select_strategy(self._workload_state(0), self.session.policy)
        self._log(
            0,
            "init",
            {
                "version": LOG_VERSION,
                "scenario": scenario.name,
                "scenario_hash": scenario.hash(),
                "seed": seed,
                "kernel": _kernel_backend(),
            },
        )

    # -- plumbing -----------------------------------------------------------

    def _log(self, tick: int, category: str, body: dict) -> LogEntry:
        entry = LogEntry(tick, category, body)
        self.log.append(entry)
        return entry

    def _workload_state(self, now: int) -> WorkloadState:
        return self.tracker.state(now, self.options.workload_method)

    def submit(self, item: Inbound) -> None:
        """Enqueue an inbound frame; it takes effect on the next tick."""
        self.queue.append(item)

    def dialogue_context(self) -> DialogueContext:
        return DialogueContext(
            vehicles=self.world.vehicles,
            zones=self.world.zones,
            beacons=self.beacons,
            alarms=self.world.alarms,
            now=self.world.tick,
            recency_window=self.world.params.recency_window,
            blocked=self.world.field.blocked,
            cell_size=self.world.field.cell_size,
            map_width=self.world.map_width,
            map_height=self.world.map_height,
            grounding=self.session.grounding,
            mode_table=self.mode_table,
        )

    # -- the tick -------------------------------------------------------------

    def tick(self) -> TickOutput:
        report = self.world.step()
        now = self.world.tick
        out = TickOutput(tick=now)

        for event in self.scenario.no_fly:
            if event.tick == now:
                self.world.apply_no_fly(event.cells)
                out.events.append({"type": "no_fly_added", "cells": [list(c) for c in event.cells]})

        alarms = list(report.alarms)
        for fa in self.scenario.false_alarms:
            if fa.tick == now:
                alarms.append(self.world.raise_alarm(fa.x, fa.y))

        for alarm in alarms:
            self._on_alarm(alarm, out)

        self._check_anomalies(out)

        # scripted operator inputs, then live ones, in arrival order
        for item in self.scenario.script:
            if item.tick == now:
                if item.text is not None:
                    gesture = Gesture(**item.gesture) if item.gesture else None
                    self._on_utterance(item.text, gesture, None, out)
                elif item.complete is not None:
                    self._on_completion(item.complete, None, out)
        while self.queue:
            inbound = self.queue.popleft()
            self._dispatch_inbound(inbound, out)

        self.metrics.record_scans(now, report.scanned)
        self._log(now, "coverage", {"scanned": report.scanned})

        continuous = self.tracker.continuous(now)
        windowed = self.tracker.state(now, WINDOWED)
        cont_state = self.tracker.state(now, CONTINUOUS)
        self.metrics.record_workload(
            WorkloadTraceRow(now, continuous, windowed.discrete_level, cont_state.discrete_level)
        )

        level = self._workload_state(now).discrete_level
        if level != self._last_level:
            self._last_level = level
            self.current_strategy = select_strategy(
                self._workload_state(now), self.session.policy
            )
            out.events.append({"type": "workload_level", "level": level})

        if self.options.digest_every and now % self.options.digest_every == 0:
            self._log(now, "digest", {"sha256": self.state_digest()})
        return out

    def run(self, ticks: int) -> None:
        for _ in range(ticks):
            self.tick()

    # -- inbound handling -------------------------------------------------------

    def _dispatch_inbound(self, inbound: Inbound, out: TickOutput) -> None:
        try:
            if inbound.kind == protocol.UTTERANCE:
                gesture_raw = inbound.payload.get("gesture")
                gesture = Gesture(**gesture_raw) if gesture_raw else None
                self._on_utterance(inbound.payload["text"], gesture, inbound.cid, out)
            elif inbound.kind == protocol.COMPLETION_RESPONSE:
                self._on_completion(inbound.payload.get("values", {}), inbound.cid, out)
            elif inbound.kind == protocol.COMMAND:
                command = _command_from_payload(inbound.payload)
                self._execute_commands((command,), out, cid=inbound.cid, echo="direct command")
            elif inbound.kind == protocol.MODE_CHANGE:
                self._on_mode_request(inbound.payload, Requester.OPERATOR, out, inbound.cid)
            else:
                out.errors.append({"cid": inbound.cid, "error": f"unsupported kind {inbound.kind}"})
        except (KeyError, TypeError, ValueError) as exc:
            out.errors.append({"cid": inbound.cid, "error": str(exc)})
        if inbound.cid is not None and not _answered(out, inbound.cid):
            # Liveness: a gated-away acknowledgement still clears the client's
            # pending state through an empty receipt.
            out.emissions.append(
                {"text": "", "severity": "info", "kind": "receipt", "cid": inbound.cid}
            )

    def _on_utterance(
        self, text: str, gesture: Optional[Gesture], cid: Optional[str], out: TickOutput
    ) -> None:
        now = self.world.tick
        try:
            utt = OperatorUtterance(text, now, gesture, cid)
        except ValueError as exc:
            out.errors.append({"cid": cid, "error": str(exc)})
            return
        ctx = self.dialogue_context()
        result = self.session.handle_utterance(utt, ctx, self._workload_state(now))
        self._absorb_session_result(result, cid, out)

    def _on_completion(self, values: dict, cid: Optional[str], out: TickOutput) -> None:
        ctx = self.dialogue_context()
        result = self.session.handle_completion(values, ctx)
        self._absorb_session_result(result, cid, out)

    def _absorb_session_result(self, result, cid: Optional[str], out: TickOutput) -> None:
        now = self.world.tick
        if result.record is not None:
            self._log(
                now,
                "grounding",
                {
                    "type": "exchange",
                    "text": result.record.text,
                    "intent": result.record.intent,
                    "resolution": result.record.resolution,
                    "rounds": result.record.rounds,
                    "strategy": result.record.strategy,
                    "vehicles": list(result.record.vehicle_ids),
                },
            )
        if result.request is not None:
            out.requests.append(
                {
                    "cid": cid,
                    "intent": result.request.intent.value if result.request.intent else None,
                    "note": result.request.note,
                    "slots": [
                        {
                            "name": s.name,
                            "kind": s.kind,
                            "prompt": s.prompt,
                            "choices": list(s.choices),
                        }
                        for s in result.request.slots
                    ],
                }
            )
        if result.plan is not None:
            for action in result.plan.actions:
                self._apply_action(action, out, cid)
            if result.plan.commands:
                self._execute_commands(result.plan.commands, out, cid, result.plan.echo)
        # Exchange-originated messages keep the strategy the exchange opened
        # under, even if the workload level moved meanwhile.
        gen = result.strategy.generation if result.strategy else None
        for emission in result.emissions:
            self._emit(emission, out, gen=gen)

    def _execute_commands(
        self,
        commands: tuple[VehicleCommand, ...],
        out: TickOutput,
        cid: Optional[str],
        echo: str,
    ) -> None:
        now = self.world.tick
        try:
            applied = [self.world.dispatch(command) for command in commands]
        except DispatchError as exc:
            self._emit(Emission(f"rejected: {exc}", Severity.WARNING, kind="rejection", cid=cid), out)
            return
        if not any(applied):
            return
        vehicle_ids = sorted({vid for c in commands for vid in c.vehicle_ids})
        event = MissionEvent(now, EventKind.COMMAND, ",".join(vehicle_ids))
        self.tracker.append(event)
        self._log(
            now,
            "mission_event",
            {"kind": "command", "subject": event.subject, "echo": echo},
        )
        out.events.append({"type": "command_applied", "vehicles": vehicle_ids, "echo": echo})

    def _apply_action(self, action: GatewayAction, out: TickOutput, cid: Optional[str]) -> None:
        now = self.world.tick
        p = action.payload
        try:
            if action.kind == "place_beacon":
                beacon = self.beacons.place(p["x"], p["y"], p["label"])
                out.events.append(
                    {"type": "beacon_placed", "id": beacon.id, "label": beacon.label,
                     "x": beacon.x, "y": beacon.y}
                )
            elif action.kind == "define_zone":
                self._zone_counter += 1
                zone = SearchZone(
                    id=f"zu{self._zone_counter}",
                    label=p["label"],
                    cx=p["cx"],
                    cy=p["cy"],
                    breadth=p["breadth"],
                    range_m=p["range"],
                    direction=p["direction"],
                )
                self.world.add_zone(zone)
                out.events.append({"type": "zone_defined", "id": zone.id, "label": zone.label})
            elif action.kind == "set_zone_direction":
                zone = self.world.zones[p["zone_id"]]
                zone.direction = p["direction"]
                out.events.append(
                    {"type": "zone_updated", "id": zone.id, "direction": zone.direction}
                )
            elif action.kind == "set_mode":
                self._on_mode_request(
                    {"task": p["task"], "stage": p["stage"], "mode_id": p["mode_id"]},
                    Requester.OPERATOR,
                    out,
                    cid,
                )
            elif action.kind == "status":
                self._emit(Emission(self._status_text(p.get("vehicle_ids") or []),
                                    Severity.INFO, kind="status", cid=cid), out)
            else:
                raise ValueError(f"unknown gateway action {action.kind!r}")
        except (BeaconError, KeyError, ValueError) as exc:
            self._emit(Emission(f"rejected: {exc}", Severity.WARNING, kind="rejection", cid=cid), out)

    def _status_text(self, vehicle_ids: list[str]) -> str:
        vehicles = (
            [self.world.vehicles[v] for v in vehicle_ids if v in self.world.vehicles]
            or list(self.world.vehicles.values())
        )
        parts = [
            f"{v.id}@({v.x:.0f},{v.y:.0f}) {type(v.behavior).__name__.lower()}" for v in vehicles
        ]
        return "; ".join(parts)

    def _on_mode_request(
        self, payload: dict, requester: Requester, out: TickOutput, cid: Optional[str]
    ) -> None:
        now = self.world.tick
        try:
            stage = Stage(payload["stage"])
            change = self.mode_table.activate_mode(
                payload["task"], stage, payload["mode_id"], requester, tick=now
            )
        except (ModeTableError, ValueError) as exc:
            self._emit(Emission(f"rejected: {exc}", Severity.WARNING, kind="rejection", cid=cid), out)
            return
        if change is None:
            self._emit(
                Emission("mode already active", Severity.INFO, confirmation=True,
                         kind="ack", cid=cid),
                out,
            )
            return
        body = {
            "task": change.task,
            "stage": change.stage.value,
            "mode_id": change.mode_id,
            "requester": change.requester.value,
            "applied": change.applied,
        }
        self._log(now, "mode_change", body)
        out.mode_changes.append(dict(body, cid=cid))
        text = "mode set" if change.applied else "recorded as proposal (no selection authority)"
        self._emit(
            Emission(f"{text}: {change.mode_id}", Severity.INFO, confirmation=change.applied,
                     kind="ack", cid=cid),
            out,
        )

    # -- events out -------------------------------------------------------------

    def _on_alarm(self, alarm: Alarm, out: TickOutput) -> None:
        now = self.world.tick
        event = MissionEvent(now, EventKind.ALARM, f"a{alarm.id}")
        self.tracker.append(event)
        self._log(
            now,
            "mission_event",
            {"kind": "alarm", "subject": event.subject, "x": alarm.x, "y": alarm.y,
             "linked_to": alarm.linked_to},
        )
        out.events.append(
            {"type": "alarm", "id": alarm.id, "x": alarm.x, "y": alarm.y,
             "linked_to": alarm.linked_to}
        )
        linked = f" (linked to a{alarm.linked_to})" if alarm.linked_to else ""
        self._emit(
            Emission(
                f"ALARM at ({alarm.x:.0f}, {alarm.y:.0f}){linked}",
                Severity.CRITICAL,
                kind="alarm",
            ),
            out,
        )

    def _check_anomalies(self, out: TickOutput) -> None:
        now = self.world.tick
        reports = self.world.field.detect_anomalies()
        current = {report.region for report in reports}
        for report in reports:
            if report.region in self._known_anomalies:
                continue
            cells = sorted(report.region)
            self._log(
                now,
                "anomaly",
                {"cells": [list(c) for c in cells], "severity": report.severity,
                 "age": report.age},
            )
            out.events.append(
                {"type": "anomaly", "cells": [list(c) for c in cells],
                 "severity": report.severity}
            )
            self._emit(
                Emission(
                    f"dark spot: {len(cells)} cells unreachable and unserved",
                    Severity.WARNING,
                    kind="anomaly",
                ),
                out,
            )
        self._known_anomalies = current

    def _emit(self, emission: Emission, out: TickOutput, gen: GenStrategy | None = None) -> None:
        decision = decide_emission(emission, gen or self.current_strategy.generation)
        self._log(
            self.world.tick,
            "grounding",
            {
                "type": "emission",
                "text": emission.text,
                "severity": emission.severity.value,
                "confirmation": emission.confirmation,
                "kind": emission.kind,
                "emitted": decision.emit,
            },
        )
        if decision.emit:
            out.emissions.append(
                {
                    "text": emission.text,
                    "severity": emission.severity.value,
                    "kind": emission.kind,
                    "cid": emission.cid,
                }
            )

    # -- snapshots, digests, logs -------------------------------------------------

    def state_digest(self) -> str:
        """Canonical hash of all mutable mission state at a tick boundary."""
        field = self.world.field
        h = hashlib.sha256()
        h.update(struct.pack("<q", self.world.tick))
        h.update(field.urgency.tobytes())
        h.update(field.presence.tobytes())
        h.update(field.above_age.tobytes())
        h.update(np.packbits(field.blocked.view(np.uint8)).tobytes())
        for vid in sorted(self.world.vehicles):
            v = self.world.vehicles[vid]
            h.update(vid.encode())
            h.update(struct.pack("<dd", v.x, v.y))
            behavior = v.behavior
            h.update(type(behavior).__name__.encode())
            if hasattr(behavior, "leg"):
                h.update(struct.pack("<q", behavior.leg))
        for intruder in self.world.intruders:
            h.update(intruder.id.encode())
            h.update(struct.pack("<dd?", intruder.x, intruder.y, intruder.active))
        for alarm in self.world.alarms:
            h.update(struct.pack("<qddq", alarm.id, alarm.x, alarm.y, alarm.tick))
        for (task, stage), active in sorted(
            self.mode_table.active.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
        ):
            h.update(f"{task}/{stage.value}={active}".encode())
        return h.hexdigest()

    def snapshot_payload(self, encoder: protocol.GridStreamEncoder) -> dict:
        """Kind-specific body of a snapshot frame."""
        world = self.world
        field = world.field
        now = world.tick
        workload_windowed = self.tracker.state(now, WINDOWED)
        workload_continuous = self.tracker.state(now, CONTINUOUS)
        return {
            "field": {
                "width": field.width,
                "height": field.height,
                "cell_size": field.cell_size,
                "urgency": encoder.encode("urgency", field.urgency),
                "presence": encoder.encode("presence", field.presence),
                "blocked": protocol.encode_bitset(field.blocked),
            },
            "vehicles": [
                {
                    "id": v.id,
                    "x": v.x,
                    "y": v.y,
                    "behavior": type(v.behavior).__name__.lower(),
                    "zone_id": getattr(v.behavior, "zone_id", None),
                    "fuel": v.fuel,
                }
                for v in world.vehicles.values()
            ],
            "alarms": [
                {
                    "id": a.id,
                    "x": a.x,
                    "y": a.y,
                    "tick": a.tick,
                    "linked_to": a.linked_to,
                    "recent": a.is_recent(now, world.params.recency_window),
                }
                for a in world.alarms
            ],
            "zones": [
                {
                    "id": z.id,
                    "label": z.label,
                    "cx": z.cx,
                    "cy": z.cy,
                    "direction": z.direction,
                    "breadth": z.breadth,
                    "range": z.range_m,
                }
                for z in world.zones.values()
            ],
            "beacons": [
                {"id": b.id, "label": b.label, "x": b.x, "y": b.y} for b in self.beacons.all()
            ],
            "workload": {
                "continuous": workload_continuous.continuous_level,
                "discrete_windowed": workload_windowed.discrete_level,
                "discrete_continuous": workload_continuous.discrete_level,
                "method": self.options.workload_method,
            },
            "strategy": {
                "interpretation": self.current_strategy.interpretation.value,
                "generation": self.current_strategy.generation.value,
            },
            "mode_table": self.mode_table.to_payload(),
        }

    def log_lines(self) -> list[str]:
        return [entry.to_json() for entry in self.log]

    def log_digest(self) -> str:
        h = hashlib.sha256()
        for line in self.log_lines():
            h.update(line.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


def _answered(out: TickOutput, cid: str) -> bool:
    buckets = (out.emissions, out.requests, out.errors, out.mode_changes)
    return any(entry.get("cid") == cid for bucket in buckets for entry in bucket)


def _kernel_backend() -> str:
    from swarmpatrol import _kernels

    return _kernels.BACKEND


def _command_from_payload(payload: dict) -> VehicleCommand:
    """Raw command frames: {'command': 'goto'|'pursue', ...}."""
    kind = payload.get("command")
    if kind == "goto":
        ids = tuple(payload["vehicle_ids"])
        routes_raw = payload.get("routes")
        if routes_raw is not None:
            routes = tuple(tuple((float(x), float(y)) for x, y in r) for r in routes_raw)
            return GotoCommand(ids, routes)
        waypoints = tuple((float(x), float(y)) for x, y in payload["waypoints"])
        return GotoCommand.single_route(ids, waypoints)
    if kind == "pursue":
        return PursueCommand(tuple(payload["vehicle_ids"]), payload["zone_id"])
    raise ValueError(f"unknown command {kind!r}")


# -- headless runs and replay -----------------------------------------------------


@dataclass
class RunResult:
    runtime: MissionRuntime
    log_lines: list[str]
    log_digest: str

    @property
    def metrics(self) -> MetricsCollector:
        return self.runtime.metrics


def run_headless(
    scenario: Scenario,
    seed: int,
    ticks: int,
    policy: StrategyPolicy | None = None,
    on_tick: Optional[Callable[[MissionRuntime, TickOutput], None]] = None,
) -> RunResult:
    """Run a scenario start to finish with no operator attached."""
    runtime = MissionRuntime(scenario, seed, policy)
    for _ in range(ticks):
        output = runtime.tick()
        if on_tick is not None:
            on_tick(runtime, output)
    return RunResult(runtime, runtime.log_lines(), runtime.log_digest())


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    partial: bool
    checked_lines: int
    divergence_line: Optional[int] = None
    divergence_tick: Optional[int] = None
    detail: str = ""


def replay(log_lines: list[str], scenario: Scenario) -> ReplayReport:
    """Re-execute the scenario and compare against a recorded log.

    The first line must be the init record carrying the scenario hash and
    seed; a hash mismatch is refused outright. Deterministic re-execution
    then reproduces the log; the first differing line is the divergence. A
    truncated log that matches as far as it goes is reported as partial.
    """
    if not log_lines:
        raise ValueError("empty log")
    head = json.loads(log_lines[0])
    if head.get("category") != "init":
        raise ValueError("log does not start with an init record")
    if head["body"].get("scenario_hash") != scenario.hash():
        raise ValueError("scenario hash mismatch: log was produced by a different scenario")
    seed = int(head["body"]["seed"])

    max_tick = max(json.loads(line)["tick"] for line in log_lines)
    result = run_headless(scenario, seed, max_tick)
    fresh = result.log_lines

    for i, (recorded, regenerated) in enumerate(zip(log_lines, fresh)):
        if recorded != regenerated:
            tick = json.loads(recorded).get("tick")
            return ReplayReport(
                ok=False,
                partial=False,
                checked_lines=i,
                divergence_line=i,
                divergence_tick=tick,
                detail="log line differs from deterministic re-execution",
            )
    if len(log_lines) < len(fresh):
        return ReplayReport(
            ok=True, partial=True, checked_lines=len(log_lines),
            detail="log is a prefix of the re-executed mission",
        )
    if len(log_lines) > len(fresh):
        return ReplayReport(
            ok=False, partial=False, checked_lines=len(fresh),
            divergence_line=len(fresh), detail="log has extra lines beyond re-execution",
        )
    return ReplayReport(ok=True, partial=False, checked_lines=len(log_lines))
