"""Conversion from interpretations to vehicle-executable commands.

Fills every slot it can derive itself (route planning over the no-fly grid,
parameter defaults) and asks the operator for exactly the slots it cannot.
The output is either a CompletionRequest naming those slots or a fully
ground plan whose vehicle commands pass dispatch validation untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from swarmpatrol.dialogue import planner
from swarmpatrol.dialogue.context import DialogueContext, Point
from swarmpatrol.dialogue.grammar import Intent
from swarmpatrol.dialogue.interpret import Confidence, Interpretation
from swarmpatrol.swarm import GotoCommand, PursueCommand, VehicleCommand

DEFAULT_ZONE_BREADTH_DEG = 60.0
DEFAULT_ZONE_RANGE_M = 400.0


class ConversionError(ValueError):
    """Contract misuse (non-unique input) or an unsatisfiable command."""


@dataclass(frozen=True)
class SlotSpec:
    """Machine-readable description of one missing slot, for console forms."""

    name: str
    kind: str  # point | waypoints | angle_deg | choice | vehicles | zone
    prompt: str
    choices: tuple[str, ...] = ()


@dataclass(frozen=True)
class CompletionRequest:
    slots: tuple[SlotSpec, ...]
    intent: Optional[Intent]
    note: str = ""

    def slot_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots)


@dataclass(frozen=True)
class GatewayAction:
    """Operator intents that steer the mission runtime rather than vehicles."""

    kind: str  # place_beacon | define_zone | set_mode | status
    payload: dict


@dataclass(frozen=True)
class ExecutablePlan:
    commands: tuple[VehicleCommand, ...] = ()
    actions: tuple[GatewayAction, ...] = ()
    echo: str = ""  # interpreted-command readback for grounding feedback


SLOT_PROMPTS = {
    "destination": SlotSpec("destination", "point", "where should they go?"),
    "position": SlotSpec("position", "point", "where should the beacon go?"),
    "center": SlotSpec("center", "point", "zone center?"),
    "direction": SlotSpec("direction", "angle_deg", "zone direction (degrees)?"),
    "zone": SlotSpec("zone", "zone", "which zone?"),
    "waypoints": SlotSpec("waypoints", "waypoints", "route to fly?"),
}


def _request(interp: Interpretation, names: tuple[str, ...], note: str = "") -> CompletionRequest:
    return CompletionRequest(tuple(SLOT_PROMPTS[n] for n in names), interp.intent, note)


def _plan_route(ctx: DialogueContext, start: Point, goal: Point) -> tuple[Point, ...]:
    """Shortest unblocked route as map waypoints, ending exactly on the goal."""
    h, w = ctx.blocked.shape

    def cell_of(p: Point) -> tuple[int, int]:
        c = min(w - 1, max(0, int(p[0] // ctx.cell_size)))
        r = min(h - 1, max(0, int(p[1] // ctx.cell_size)))
        return r, c

    start_cell, goal_cell = cell_of(start), cell_of(goal)
    if ctx.blocked[goal_cell]:
        raise ConversionError("destination lies inside a no-fly zone")
    if ctx.blocked[start_cell]:
        raise ConversionError("vehicle is inside a no-fly zone")
    path = planner.shortest_path(ctx.blocked, start_cell, goal_cell)
    if path is None:
        raise ConversionError("no route avoids the no-fly zones")
    corners = planner.compress_corners(path)
    waypoints = [
        ((c + 0.5) * ctx.cell_size, (r + 0.5) * ctx.cell_size) for r, c in corners[1:]
    ]
    if not waypoints or waypoints[-1] != goal:
        waypoints.append(goal)
    return tuple(waypoints)


def convert(
    interp: Interpretation, ctx: DialogueContext
) -> Union[ExecutablePlan, CompletionRequest]:
    """Ground a unique interpretation; ask for what cannot be derived."""
    if interp.confidence is not Confidence.UNIQUE:
        raise ConversionError(f"convert requires a unique interpretation, got {interp.confidence}")

    if interp.intent is Intent.DISPATCH:
        if "destination" in interp.missing and not interp.route:
            return _request(interp, ("destination",))
        if interp.route:
            routes = tuple(interp.route for _ in interp.vehicle_ids)
        else:
            routes = tuple(
                _plan_route(
                    ctx,
                    (ctx.vehicles[vid].x, ctx.vehicles[vid].y),
                    interp.destination,
                )
                for vid in interp.vehicle_ids
            )
        command = GotoCommand(interp.vehicle_ids, routes)
        where = interp.labels[0] if interp.labels else f"({interp.destination[0]:.0f}, {interp.destination[1]:.0f})"
        return ExecutablePlan(
            commands=(command,),
            echo=f"{', '.join(interp.vehicle_ids)} goto {where}",
        )

    if interp.intent is Intent.PURSUE:
        if "zone" in interp.missing:
            return _request(interp, ("zone",))
        zone = ctx.zones[interp.zone_id]
        direction_deg = interp.zone_params.get("direction")
        if direction_deg is None and zone.direction is None:
            return _request(
                interp, ("direction",), note=f"zone {zone.label!r} has no direction set"
            )
        actions = ()
        if direction_deg is not None:
            actions = (
                GatewayAction(
                    "set_zone_direction",
                    {"zone_id": zone.id, "direction": math.radians(direction_deg)},
                ),
            )
        return ExecutablePlan(
            commands=(PursueCommand(interp.vehicle_ids, zone.id),),
            actions=actions,
            echo=f"{', '.join(interp.vehicle_ids)} pursue zone {zone.label}",
        )

    if interp.intent is Intent.PLACE_BEACON:
        if "position" in interp.missing and interp.point is None:
            return _request(interp, ("position",))
        label = interp.labels[0]
        return ExecutablePlan(
            actions=(
                GatewayAction(
                    "place_beacon",
                    {"x": interp.point[0], "y": interp.point[1], "label": label},
                ),
            ),
            echo=f"beacon {label} at ({interp.point[0]:.0f}, {interp.point[1]:.0f})",
        )

    if interp.intent is Intent.DEFINE_ZONE:
        needed = tuple(n for n in interp.missing if n in ("center", "direction"))
        if interp.point is None and "center" not in needed:
            needed = ("center",) + needed
        if needed:
            return _request(interp, needed)
        params = interp.zone_params
        label = interp.labels[0]
        return ExecutablePlan(
            actions=(
                GatewayAction(
                    "define_zone",
                    {
                        "label": label,
                        "cx": interp.point[0],
                        "cy": interp.point[1],
                        "direction": math.radians(params["direction"]),
                        "breadth": math.radians(params.get("breadth", DEFAULT_ZONE_BREADTH_DEG)),
                        "range": params.get("range", DEFAULT_ZONE_RANGE_M),
                    },
                ),
            ),
            echo=f"zone {label} defined",
        )

    if interp.intent is Intent.SET_MODE:
        return ExecutablePlan(
            actions=(
                GatewayAction(
                    "set_mode",
                    {
                        "task": interp.mode_task,
                        "stage": interp.mode_stage,
                        "mode_id": interp.mode_id,
                    },
                ),
            ),
            echo=f"mode {interp.mode_id} on ({interp.mode_task}, {interp.mode_stage})",
        )

    if interp.intent is Intent.QUERY_STATUS:
        return ExecutablePlan(
            actions=(GatewayAction("status", {"vehicle_ids": list(interp.vehicle_ids)}),),
            echo="status report",
        )

    raise ConversionError(f"no conversion for intent {interp.intent}")  # pragma: no cover
