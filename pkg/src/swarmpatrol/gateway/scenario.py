"""Scenario files: schema, validation, and world construction.

A scenario is one JSON document holding everything a mission needs except
the seed and tick count: map geometry, field and swarm parameters, the
vehicle roster, no-fly areas (optionally appearing mid-mission), intruder
and false-alarm scripts, pre-defined zones and beacons, a scripted operator,
and runtime knobs. Unknown fields are rejected, and validation reports every
offending field at once.

Angles are degrees in the file (operator-facing); radians internally.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Any

import jsonschema

from swarmpatrol.field import FieldParams, PheromoneField
from swarmpatrol.swarm import Intruder, SearchZone, SwarmParams, Vehicle, World

_NUM = {"type": "number"}
_POS_NUM = {"type": "number", "exclusiveMinimum": 0}
_NAT = {"type": "integer", "minimum": 0}
_POINT = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

SCENARIO_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["map", "vehicles"],
    "properties": {
        "name": {"type": "string"},
        "map": {
            "type": "object",
            "additionalProperties": False,
            "required": ["width", "height"],
            "properties": {
                "width": {"type": "integer", "minimum": 1},
                "height": {"type": "integer", "minimum": 1},
                "cell_size": _POS_NUM,
            },
        },
        "field": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "urgency_growth": {"type": "number", "minimum": 0},
                "evaporation_rate": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "diffusion_rate": {"type": "number", "minimum": 0, "maximum": 0.25},
                "presence_deposit": {"type": "number", "minimum": 0},
                "presence_evaporation": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "anomaly_threshold": {"anyOf": [_POS_NUM, {"type": "null"}]},
                "anomaly_threshold_factor": _POS_NUM,
                "anomaly_min_age": {"type": "integer", "minimum": 1},
            },
        },
        "swarm": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gradient_radius": {"type": "integer", "minimum": 1},
                "patrol_policy": {"enum": ["pheromone", "random_walk"]},
                "alarm_cooldown": {"type": "integer", "minimum": 1},
                "recency_window": {"type": "integer", "minimum": 1},
                "link_d_max": _POS_NUM,
                "link_t_max": {"type": "integer", "minimum": 1},
            },
        },
        "no_fly": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "tick": _NAT,
                    "rect": {"type": "array", "items": _NAT, "minItems": 4, "maxItems": 4},
                    "cells": {
                        "type": "array",
                        "items": {"type": "array", "items": _NAT, "minItems": 2, "maxItems": 2},
                        "minItems": 1,
                    },
                    "polygon": {"type": "array", "items": _POINT, "minItems": 3},
                },
                "oneOf": [
                    {"required": ["rect"]},
                    {"required": ["cells"]},
                    {"required": ["polygon"]},
                ],
            },
        },
        "vehicles": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "x", "y"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "x": _NUM,
                    "y": _NUM,
                    "speed": _POS_NUM,
                    "sensor_radius": _POS_NUM,
                    "fuel": {"type": "integer", "minimum": 0},
                },
            },
        },
        "intruders": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "path"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "speed": _POS_NUM,
                    "start_tick": _NAT,
                    "path": {"type": "array", "items": _POINT, "minItems": 1},
                },
            },
        },
        "false_alarms": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["tick", "x", "y"],
                "properties": {"tick": _NAT, "x": _NUM, "y": _NUM},
            },
        },
        "zones": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "label", "cx", "cy", "breadth_deg", "range"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "label": {"type": "string", "minLength": 1},
                    "cx": _NUM,
                    "cy": _NUM,
                    "direction_deg": _NUM,
                    "breadth_deg": {"type": "number", "exclusiveMinimum": 0, "maximum": 360},
                    "range": _POS_NUM,
                },
            },
        },
        "beacons": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["label", "x", "y"],
                "properties": {
                    "label": {"type": "string", "minLength": 1},
                    "x": _NUM,
                    "y": _NUM,
                },
            },
        },
        "operator_script": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["tick"],
                "properties": {
                    "tick": _NAT,
                    "text": {"type": "string", "minLength": 1},
                    "gesture": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["kind", "x", "y"],
                        "properties": {
                            "kind": {"enum": ["click", "drag"]},
                            "x": _NUM,
                            "y": _NUM,
                            "x2": _NUM,
                            "y2": _NUM,
                        },
                    },
                    "complete": {"type": "object"},
                },
                "oneOf": [{"required": ["text"]}, {"required": ["complete"]}],
            },
        },
        "workload": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "window": {"type": "integer", "minimum": 1},
                "w_cmd": _POS_NUM,
                "w_alarm": _POS_NUM,
                "half_life": _POS_NUM,
                "thresholds": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
            },
        },
        "runtime": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "snapshot_cadence": {"type": "integer", "minimum": 1},
                "digest_every": _NAT,
                "workload_method": {"enum": ["windowed", "continuous"]},
                "coverage_target": {"type": "integer", "minimum": 1},
            },
        },
    },
}


class ScenarioError(ValueError):
    """Schema or consistency failure; message lists every offending field."""


@dataclass(frozen=True)
class NoFlyEvent:
    tick: int
    cells: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class FalseAlarm:
    tick: int
    x: float
    y: float


@dataclass(frozen=True)
class ScriptedInput:
    tick: int
    text: str | None = None
    gesture: dict | None = None
    complete: dict | None = None


@dataclass(frozen=True)
class RuntimeOptions:
    snapshot_cadence: int = 1
    digest_every: int = 1
    workload_method: str = "windowed"
    coverage_target: int = 120


@dataclass
class Scenario:
    raw: dict
    name: str
    map_width: int
    map_height: int
    cell_size: float
    field_params: FieldParams
    swarm_params: SwarmParams
    vehicles: list[dict]
    intruders: list[dict]
    zones: list[dict]
    beacons: list[dict]
    no_fly: list[NoFlyEvent]
    false_alarms: list[FalseAlarm]
    script: list[ScriptedInput]
    workload_kwargs: dict
    options: RuntimeOptions = dc_field(default_factory=RuntimeOptions)

    def hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _point_in_polygon(x: float, y: float, polygon: list[list[float]]) -> bool:
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x_cross > x:
                inside = not inside
    return inside


def _no_fly_cells(entry: dict, width: int, height: int, cell_size: float, errors: list[str]):
    cells: list[tuple[int, int]] = []
    if "rect" in entry:
        r0, c0, r1, c1 = entry["rect"]
        if r1 < r0 or c1 < c0 or r1 >= height or c1 >= width:
            errors.append(f"no_fly rect out of range: {entry['rect']}")
            return ()
        cells = [(r, c) for r in range(r0, r1 + 1) for c in range(c0, c1 + 1)]
    elif "cells" in entry:
        for r, c in entry["cells"]:
            if r >= height or c >= width:
                errors.append(f"no_fly cell out of range: [{r}, {c}]")
            else:
                cells.append((r, c))
    else:
        poly = entry["polygon"]
        for r in range(height):
            for c in range(width):
                cx, cy = (c + 0.5) * cell_size, (r + 0.5) * cell_size
                if _point_in_polygon(cx, cy, poly):
                    cells.append((r, c))
        if not cells:
            errors.append("no_fly polygon covers no cell center")
    return tuple(cells)


def parse_scenario(doc: dict) -> Scenario:
    """Validate a scenario document and normalize it; raises ScenarioError."""
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = [
        f"{'/'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}"
        for err in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    ]
    if errors:
        raise ScenarioError("invalid scenario: " + "; ".join(errors))

    map_cfg = doc["map"]
    width, height = map_cfg["width"], map_cfg["height"]
    cell_size = float(map_cfg.get("cell_size", 25.0))
    map_w, map_h = width * cell_size, height * cell_size
    consistency: list[str] = []

    try:
        field_params = FieldParams(**doc.get("field", {}))
    except ValueError as exc:
        raise ScenarioError(f"invalid scenario: field: {exc}") from None
    try:
        swarm_params = SwarmParams(**doc.get("swarm", {}))
    except ValueError as exc:
        raise ScenarioError(f"invalid scenario: swarm: {exc}") from None

    seen_vehicles = set()
    for v in doc["vehicles"]:
        if v["id"] in seen_vehicles:
            consistency.append(f"duplicate vehicle id {v['id']!r}")
        seen_vehicles.add(v["id"])
        if not (0 <= v["x"] <= map_w and 0 <= v["y"] <= map_h):
            consistency.append(f"vehicle {v['id']!r} starts off the map")

    zones = []
    seen_zone_ids = set()
    seen_zone_labels = set()
    for z in doc.get("zones", []):
        if z["id"] in seen_zone_ids:
            consistency.append(f"duplicate zone id {z['id']!r}")
        if z["label"].lower() in seen_zone_labels:
            consistency.append(f"duplicate zone label {z['label']!r}")
        seen_zone_ids.add(z["id"])
        seen_zone_labels.add(z["label"].lower())
        if not (z["range"] <= z["cx"] <= map_w - z["range"]) or not (
            z["range"] <= z["cy"] <= map_h - z["range"]
        ):
            consistency.append(f"zone {z['id']!r} sector sticks off the map")
        zones.append(z)

    seen_beacons = set()
    for b in doc.get("beacons", []):
        if b["label"].lower() in seen_beacons:
            consistency.append(f"duplicate beacon label {b['label']!r}")
        seen_beacons.add(b["label"].lower())
        if not (0 <= b["x"] <= map_w and 0 <= b["y"] <= map_h):
            consistency.append(f"beacon {b['label']!r} off the map")

    no_fly = []
    for entry in doc.get("no_fly", []):
        cells = _no_fly_cells(entry, width, height, cell_size, consistency)
        if cells:
            no_fly.append(NoFlyEvent(int(entry.get("tick", 0)), cells))
    no_fly.sort(key=lambda e: e.tick)

    if consistency:
        raise ScenarioError("invalid scenario: " + "; ".join(consistency))

    return Scenario(
        raw=doc,
        name=doc.get("name", "unnamed"),
        map_width=width,
        map_height=height,
        cell_size=cell_size,
        field_params=field_params,
        swarm_params=swarm_params,
        vehicles=list(doc["vehicles"]),
        intruders=list(doc.get("intruders", [])),
        zones=zones,
        beacons=list(doc.get("beacons", [])),
        no_fly=no_fly,
        false_alarms=[
            FalseAlarm(int(f["tick"]), float(f["x"]), float(f["y"]))
            for f in doc.get("false_alarms", [])
        ],
        script=[
            ScriptedInput(
                int(s["tick"]), s.get("text"), s.get("gesture"), s.get("complete")
            )
            for s in doc.get("operator_script", [])
        ],
        workload_kwargs=_workload_kwargs(doc.get("workload", {})),
        options=RuntimeOptions(**doc.get("runtime", {})),
    )


def _workload_kwargs(cfg: dict) -> dict:
    out = dict(cfg)
    if "thresholds" in out:
        out["thresholds"] = tuple(out["thresholds"])
    return out


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except ValueError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from None
    return parse_scenario(doc)


def build_world(scenario: Scenario, seed: int) -> World:
    """Instantiate the simulation world at tick zero (tick-0 no-fly applied)."""
    field = PheromoneField(
        scenario.map_width,
        scenario.map_height,
        cell_size=scenario.cell_size,
        params=scenario.field_params,
    )
    world = World(field, params=scenario.swarm_params, seed=seed)
    for event in scenario.no_fly:
        if event.tick == 0:
            field.block_cells(event.cells)
    for v in scenario.vehicles:
        world.add_vehicle(
            Vehicle(
                id=v["id"],
                x=float(v["x"]),
                y=float(v["y"]),
                speed=float(v.get("speed", 20.0)),
                sensor_radius=float(v.get("sensor_radius", 40.0)),
                fuel=v.get("fuel"),
            )
        )
    for i in scenario.intruders:
        world.add_intruder(
            Intruder(
                id=i["id"],
                speed=float(i.get("speed", 10.0)),
                path=[(float(x), float(y)) for x, y in i["path"]],
                start_tick=int(i.get("start_tick", 0)),
            )
        )
    for z in scenario.zones:
        world.add_zone(
            SearchZone(
                id=z["id"],
                label=z["label"],
                cx=float(z["cx"]),
                cy=float(z["cy"]),
                breadth=math.radians(float(z["breadth_deg"])),
                range_m=float(z["range"]),
                direction=(
                    math.radians(float(z["direction_deg"])) if "direction_deg" in z else None
                ),
            )
        )
    return world
