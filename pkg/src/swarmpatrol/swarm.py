"""Vehicles, intruders, alarms, and the per-tick swarm update.

Patrollers chase the pheromone gradient, pursuers fly a deterministic
angular lawnmower inside their search zone, goto vehicles follow explicit
waypoints and fall back to patrol. Every moving vehicle scans its sensor
footprint into the field; sensor contact with an intruder raises an alarm,
and alarms close in space and time get chained as "same intruder".

All iteration is in roster order and all randomness flows from the world's
seeded RNG, so a seed plus a command trace fully determines the run.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional, Sequence

from swarmpatrol.field import Cell, PheromoneField

Point = tuple[float, float]


class DispatchError(ValueError):
    """A vehicle command referenced unknown ids or unresolved parameters."""


# -- behaviors --------------------------------------------------------------


@dataclass
class Patrol:
    kind: str = "patrol"


@dataclass
class Pursue:
    zone_id: str
    leg: int = 0
    waypoints: Optional[list[Point]] = None  # lazily built from the zone
    kind: str = "pursue"


@dataclass
class Goto:
    waypoints: list[Point]
    leg: int = 0
    kind: str = "goto"


@dataclass
class Vehicle:
    id: str
    x: float
    y: float
    speed: float
    sensor_radius: float
    behavior: Patrol | Pursue | Goto = dc_field(default_factory=Patrol)
    fuel: Optional[int] = None  # ticks of endurance; None = unlimited
    walk_target: Optional[Cell] = None  # random-walk baseline state
    patrol_target: Optional[Cell] = None  # committed gradient target
    patrol_target_score: float = 0.0

    def pos(self) -> Point:
        return self.x, self.y


@dataclass
class Intruder:
    id: str
    speed: float
    path: list[Point]
    start_tick: int = 0
    leg: int = 0
    x: float = 0.0
    y: float = 0.0
    active: bool = False
    entered: bool = False

    def pos(self) -> Point:
        return self.x, self.y


@dataclass(frozen=True)
class Alarm:
    id: int
    x: float
    y: float
    tick: int
    linked_to: Optional[int] = None

    def is_recent(self, now: int, window: int) -> bool:
        return (now - self.tick) <= window


@dataclass
class SearchZone:
    """Pursuit sector: center, facing direction, angular breadth, max range.

    Direction may be unset while the zone is only partially defined; such a
    zone is a valid referent but not yet flyable.
    """

    id: str
    label: str
    cx: float
    cy: float
    breadth: float
    range_m: float
    direction: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0 < self.breadth <= 2 * math.pi + 1e-9:
            raise ValueError("zone breadth must be in (0, 2*pi]")
        if self.range_m <= 0:
            raise ValueError("zone range must be > 0")

    def is_flyable(self) -> bool:
        return self.direction is not None

    def contains(self, x: float, y: float, slack: float = 1e-6) -> bool:
        dx, dy = x - self.cx, y - self.cy
        if math.hypot(dx, dy) > self.range_m + slack:
            return False
        if self.breadth >= 2 * math.pi - 1e-9:
            return True
        ang = math.atan2(dy, dx)
        diff = (ang - (self.direction or 0.0) + math.pi) % (2 * math.pi) - math.pi
        return abs(diff) <= self.breadth / 2 + slack


# -- vehicle commands (the vehicle-proper language) -------------------------


@dataclass(frozen=True)
class GotoCommand:
    """Send vehicles along waypoint routes, one route per vehicle."""

    vehicle_ids: tuple[str, ...]
    routes: tuple[tuple[Point, ...], ...]

    def __post_init__(self) -> None:
        if len(self.routes) != len(self.vehicle_ids):
            raise ValueError("one route per vehicle required")
        if any(not route for route in self.routes):
            raise ValueError("goto routes need at least one waypoint")

    @classmethod
    def single_route(cls, vehicle_ids: Iterable[str], waypoints: Iterable[Point]) -> "GotoCommand":
        ids = tuple(vehicle_ids)
        route = tuple(waypoints)
        return cls(ids, tuple(route for _ in ids))


@dataclass(frozen=True)
class PursueCommand:
    vehicle_ids: tuple[str, ...]
    zone_id: str


VehicleCommand = GotoCommand | PursueCommand


@dataclass(frozen=True)
class SwarmParams:
    gradient_radius: int = 8
    patrol_policy: str = "pheromone"  # or "random_walk" for the baseline
    alarm_cooldown: int = 30  # min ticks between alarms for one intruder
    recency_window: int = 120
    link_d_max: float = 800.0
    link_t_max: int = 240

    def __post_init__(self) -> None:
        if self.patrol_policy not in ("pheromone", "random_walk"):
            raise ValueError(f"unknown patrol policy: {self.patrol_policy!r}")
        if self.gradient_radius < 1:
            raise ValueError("gradient_radius must be >= 1")


@dataclass
class TickReport:
    """What one swarm tick produced, for logging and metrics."""

    scanned: list[int]  # flat row-major cell indices scanned this tick
    alarms: list[Alarm]


def link_alarm(
    new_x: float,
    new_y: float,
    new_tick: int,
    history: Sequence[Alarm],
    d_max: float,
    t_max: int,
) -> Optional[int]:
    """Id of the most recent strictly-earlier alarm within the gate, else None.

    History must be tick-ordered; on equal ticks the latest appended wins.
    """
    for alarm in reversed(history):
        if alarm.tick >= new_tick:
            continue
        if new_tick - alarm.tick > t_max:
            break
        if math.hypot(alarm.x - new_x, alarm.y - new_y) <= d_max:
            return alarm.id
    return None


def zone_sweep(zone: SearchZone, spacing: float) -> list[Point]:
    """Deterministic boustrophedon over the zone sector.

    Concentric arcs from the inside out, alternating sweep direction per
    ring; every waypoint (and every straight leg between consecutive ones)
    stays inside the sector.
    """
    if not zone.is_flyable():
        raise ValueError(f"zone {zone.id} has no direction set")
    spacing = max(spacing, 1e-6)
    n_rings = max(1, int(math.ceil(zone.range_m / max(spacing, zone.range_m / 12))))
    half = zone.breadth / 2
    points: list[Point] = []
    for i in range(n_rings):
        radius = zone.range_m * (i + 0.5) / n_rings
        arc_step = min(math.pi / 8, spacing / max(radius, 1e-9))
        n_steps = max(1, int(math.ceil(zone.breadth / arc_step)))
        angles = [-half + zone.breadth * k / n_steps for k in range(n_steps + 1)]
        if i % 2 == 1:
            angles.reverse()
        for rel in angles:
            ang = zone.direction + rel
            points.append((zone.cx + radius * math.cos(ang), zone.cy + radius * math.sin(ang)))
    return points


def _move_toward(x: float, y: float, tx: float, ty: float, dist: float) -> tuple[float, float, bool]:
    """Advance up to ``dist`` toward (tx, ty); True when the target is reached."""
    dx, dy = tx - x, ty - y
    gap = math.hypot(dx, dy)
    if gap <= dist or gap == 0.0:
        return tx, ty, True
    scale = dist / gap
    return x + dx * scale, y + dy * scale, False


class World:
    """Everything the tick loop mutates. Single writer, snapshot readers."""

    def __init__(
        self,
        field: PheromoneField,
        params: SwarmParams | None = None,
        seed: int = 0,
    ) -> None:
        self.field = field
        self.params = params or SwarmParams()
        self.rng = random.Random(seed)
        self.tick = 0
        self.vehicles: dict[str, Vehicle] = {}
        self.intruders: list[Intruder] = []
        self.alarms: list[Alarm] = []
        self.zones: dict[str, SearchZone] = {}
        self._next_alarm_id = 1
        self._last_intruder_alarm: dict[str, int] = {}

    # -- setup -------------------------------------------------------------

    @property
    def map_width(self) -> float:
        return self.field.width * self.field.cell_size

    @property
    def map_height(self) -> float:
        return self.field.height * self.field.cell_size

    def in_map(self, x: float, y: float) -> bool:
        return 0 <= x <= self.map_width and 0 <= y <= self.map_height

    def add_vehicle(self, vehicle: Vehicle) -> None:
        if vehicle.id in self.vehicles:
            raise ValueError(f"duplicate vehicle id {vehicle.id!r}")
        if not self.in_map(vehicle.x, vehicle.y):
            raise ValueError(f"vehicle {vehicle.id} starts outside the map")
        if vehicle.speed <= 0:
            raise ValueError("vehicle speed must be > 0")
        self.vehicles[vehicle.id] = vehicle

    def add_intruder(self, intruder: Intruder) -> None:
        if not intruder.path:
            raise ValueError("intruder path must be non-empty")
        intruder.x, intruder.y = intruder.path[0]
        self.intruders.append(intruder)

    def add_zone(self, zone: SearchZone) -> None:
        if zone.id in self.zones:
            raise ValueError(f"duplicate zone id {zone.id!r}")
        self.zones[zone.id] = zone

    def apply_no_fly(self, cells: Iterable[Cell]) -> None:
        """Block cells mid-mission; any vehicle standing there is relocated."""
        cells = list(cells)
        self.field.block_cells(cells)
        for vehicle in self.vehicles.values():
            cell = self.field.cell_of(vehicle.x, vehicle.y)
            if self.field.blocked[cell]:
                vehicle.x, vehicle.y = self._nearest_open_center(vehicle.x, vehicle.y)

    def _nearest_open_center(self, x: float, y: float) -> Point:
        best = None
        for r in range(self.field.height):
            for c in range(self.field.width):
                if self.field.blocked[r, c]:
                    continue
                cx, cy = self.field.center_of((r, c))
                d = (cx - x) ** 2 + (cy - y) ** 2
                if best is None or d < best[0]:
                    best = (d, (cx, cy))
        if best is None:
            raise RuntimeError("no unblocked cell left on the map")
        return best[1]

    # -- alarms ------------------------------------------------------------

    def raise_alarm(self, x: float, y: float, intruder_id: str | None = None) -> Alarm:
        linked = link_alarm(x, y, self.tick, self.alarms, self.params.link_d_max, self.params.link_t_max)
        alarm = Alarm(self._next_alarm_id, x, y, self.tick, linked)
        self._next_alarm_id += 1
        self.alarms.append(alarm)
        if intruder_id is not None:
            self._last_intruder_alarm[intruder_id] = self.tick
        return alarm

    # -- dispatch ----------------------------------------------------------

    def dispatch(self, command: VehicleCommand) -> bool:
        """Apply a fully-ground command; returns False for an empty target set.

        Validation is atomic: any unknown id or unresolved zone leaves every
        vehicle untouched.
        """
        if not command.vehicle_ids:
            return False
        missing = [vid for vid in command.vehicle_ids if vid not in self.vehicles]
        if missing:
            raise DispatchError(f"unknown vehicle ids: {', '.join(missing)}")
        if isinstance(command, PursueCommand):
            zone = self.zones.get(command.zone_id)
            if zone is None:
                raise DispatchError(f"unknown zone id: {command.zone_id}")
            if not zone.is_flyable():
                raise DispatchError(f"zone {command.zone_id} is missing its direction")
            for vid in command.vehicle_ids:
                self.vehicles[vid].behavior = Pursue(zone_id=command.zone_id)
        elif isinstance(command, GotoCommand):
            for route in command.routes:
                for wx, wy in route:
                    if not self.in_map(wx, wy):
                        raise DispatchError(f"waypoint outside the map: ({wx:.0f}, {wy:.0f})")
            for vid, route in zip(command.vehicle_ids, command.routes):
                self.vehicles[vid].behavior = Goto(waypoints=list(route))
        else:
            raise DispatchError(f"unsupported command type: {type(command).__name__}")
        return True

    # -- per-tick update ----------------------------------------------------

    def step(self) -> TickReport:
        """One tick: field dynamics, vehicles, intruders, detections."""
        self.tick += 1
        self.field.step()
        scanned: set[int] = set()
        for vehicle in self.vehicles.values():
            self._step_vehicle(vehicle, scanned)
        for intruder in self.intruders:
            self._step_intruder(intruder)
        alarms = self._detect()
        return TickReport(scanned=sorted(scanned), alarms=alarms)

    # vehicle behaviors

    def _step_vehicle(self, vehicle: Vehicle, scanned: set[int]) -> None:
        if vehicle.fuel is not None:
            if vehicle.fuel <= 0:
                return  # dry tanks: hold position, sensors off
            vehicle.fuel -= 1
        behavior = vehicle.behavior
        if isinstance(behavior, Patrol):
            if self.params.patrol_policy == "random_walk":
                self._walk_randomly(vehicle)
            else:
                self._follow_gradient(vehicle)
        elif isinstance(behavior, Goto):
            self._follow_waypoints(vehicle, behavior)
        elif isinstance(behavior, Pursue):
            self._sweep_zone(vehicle, behavior)
        self._scan_footprint(vehicle, scanned)

    def _follow_gradient(self, vehicle: Vehicle) -> None:
        field = self.field
        cell = field.cell_of(vehicle.x, vehicle.y)
        if field.blocked[cell]:  # should not happen; relocate defensively
            vehicle.x, vehicle.y = self._nearest_open_center(vehicle.x, vehicle.y)
            cell = field.cell_of(vehicle.x, vehicle.y)

        # Stick with the committed target until it is reached, walled off, or
        # visibly served by someone else; re-picking every tick makes vehicles
        # thrash between near-equal cells (their own claims repel them).
        target = vehicle.patrol_target
        if target is not None and (
            target == cell
            or field.blocked[target]
            or float(field.urgency[target]) < 0.5 * vehicle.patrol_target_score
        ):
            vehicle.patrol_target = target = None

        if target is not None:
            tr, tc, nr, nc = field.gradient_step(cell, self.params.gradient_radius, goal=target)
            if (tr, tc) == cell:  # goal slipped out of reach
                vehicle.patrol_target = target = None
        if target is None:
            tr, tc, nr, nc = field.gradient_step(cell, self.params.gradient_radius)
            if (tr, tc) == cell:
                return
            vehicle.patrol_target = (tr, tc)
            vehicle.patrol_target_score = float(field.urgency[tr, tc])
        # Claim the target so the next patroller in roster order picks its own;
        # without claims, co-located vehicles see identical fields and lock step.
        field.deposit_presence((tr, tc))
        tx, ty = field.center_of((nr, nc))
        vehicle.x, vehicle.y, _ = _move_toward(vehicle.x, vehicle.y, tx, ty, vehicle.speed)

    def _walk_randomly(self, vehicle: Vehicle) -> None:
        cell = self.field.cell_of(vehicle.x, vehicle.y)
        target = vehicle.walk_target
        if target is None or target == cell or self.field.blocked[target]:
            r, c = cell
            options = [
                (nr, nc)
                for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
                if self.field.in_bounds((nr, nc)) and not self.field.blocked[nr, nc]
            ]
            if not options:
                return
            target = options[self.rng.randrange(len(options))]
            vehicle.walk_target = target
        tx, ty = self.field.center_of(target)
        vehicle.x, vehicle.y, arrived = _move_toward(vehicle.x, vehicle.y, tx, ty, vehicle.speed)
        if arrived:
            vehicle.walk_target = None

    def _follow_waypoints(self, vehicle: Vehicle, behavior: Goto) -> None:
        tx, ty = behavior.waypoints[behavior.leg]
        vehicle.x, vehicle.y, arrived = _move_toward(vehicle.x, vehicle.y, tx, ty, vehicle.speed)
        if arrived:
            behavior.leg += 1
            if behavior.leg == len(behavior.waypoints):
                vehicle.behavior = Patrol()

    def _sweep_zone(self, vehicle: Vehicle, behavior: Pursue) -> None:
        zone = self.zones.get(behavior.zone_id)
        if zone is None or not zone.is_flyable():
            vehicle.behavior = Patrol()
            return
        if behavior.waypoints is None:
            behavior.waypoints = zone_sweep(zone, vehicle.sensor_radius)
            behavior.leg = 0
        tx, ty = behavior.waypoints[behavior.leg]
        vehicle.x, vehicle.y, arrived = _move_toward(vehicle.x, vehicle.y, tx, ty, vehicle.speed)
        if arrived:
            behavior.leg = (behavior.leg + 1) % len(behavior.waypoints)

    def _scan_footprint(self, vehicle: Vehicle, scanned: set[int]) -> None:
        cells = self.footprint_cells(vehicle.x, vehicle.y, vehicle.sensor_radius)
        own = self.field.cell_of(vehicle.x, vehicle.y)
        self.field.scan(cells, deposit_at=own)
        width = self.field.width
        scanned.update(r * width + c for r, c in cells)

    def footprint_cells(self, x: float, y: float, radius: float) -> list[Cell]:
        """In-bounds cells whose center lies within ``radius`` of (x, y)."""
        f = self.field
        r_lo, c_lo = f.cell_of(x - radius, y - radius)
        r_hi, c_hi = f.cell_of(x + radius, y + radius)
        out = []
        for r in range(r_lo, r_hi + 1):
            for c in range(c_lo, c_hi + 1):
                cx, cy = f.center_of((r, c))
                if (cx - x) ** 2 + (cy - y) ** 2 <= radius * radius:
                    out.append((r, c))
        return out

    # intruders and detection

    def _step_intruder(self, intruder: Intruder) -> None:
        if self.tick < intruder.start_tick:
            return
        if not intruder.entered:
            intruder.entered = True
            intruder.active = True
            intruder.x, intruder.y = intruder.path[0]
            intruder.leg = 1
        if not intruder.active:
            return
        budget = intruder.speed
        while budget > 0 and intruder.leg < len(intruder.path):
            tx, ty = intruder.path[intruder.leg]
            gap = math.hypot(tx - intruder.x, ty - intruder.y)
            if gap > budget:
                intruder.x, intruder.y, _ = _move_toward(intruder.x, intruder.y, tx, ty, budget)
                return
            intruder.x, intruder.y = tx, ty
            budget -= gap
            intruder.leg += 1
        if intruder.leg >= len(intruder.path):
            intruder.active = False  # slipped away off-path

    def _detect(self) -> list[Alarm]:
        raised = []
        for intruder in self.intruders:
            if not intruder.active:
                continue
            last = self._last_intruder_alarm.get(intruder.id)
            if last is not None and self.tick - last < self.params.alarm_cooldown:
                continue
            for vehicle in self.vehicles.values():
                if vehicle.fuel is not None and vehicle.fuel <= 0:
                    continue
                if math.hypot(vehicle.x - intruder.x, vehicle.y - intruder.y) <= vehicle.sensor_radius:
                    raised.append(self.raise_alarm(intruder.x, intruder.y, intruder.id))
                    break
        return raised
