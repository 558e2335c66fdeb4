"""Acceptance suite: one test per release criterion, one printed line each.

Run with `pytest -s tests/test_acceptance.py` to see the PASS lines; any
failure fails the build. Stated runtime budgets are asserted, not aspired
to.
"""

from __future__ import annotations

import json
import math
import random
import time

import numpy as np
import pytest

from swarmpatrol.dialogue import (
    Confidence,
    DialogueContext,
    DialogueSession,
    Emission,
    GenStrategy,
    InterpStrategy,
    OperatorUtterance,
    Severity,
    decide_emission,
    default_policy,
)
from swarmpatrol.field import FieldParams, PheromoneField
from swarmpatrol.gateway import parse_scenario, replay, run_headless
from swarmpatrol.gateway.metrics import MetricsCollector
from swarmpatrol.missions import BeaconRegistry, Requester, SelectionPolicy, default_mode_table
from swarmpatrol.swarm import PursueCommand, SearchZone, SwarmParams, Vehicle, World
from swarmpatrol.workload import (
    CONTINUOUS,
    EventKind,
    MissionEvent,
    WorkloadState,
    WorkloadTracker,
    calibrate_agreement,
    classify_windowed,
)

from oracles import brute_force_workload
from scenario_helpers import random_scenario


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance] {status}  {name}{suffix}")
    assert ok, f"{name}{suffix}"


def test_c1_windowed_level_conformance():
    """Exhaustive (commands x alarms x in/out of window) grid in under a second."""
    t0 = time.perf_counter()
    window = 180
    now = 1000
    checked = 0
    for n_cmd in range(4):
        for n_alarm in range(4):
            for inside in (True, False):
                base = now - 10 if inside else now - window - 50
                log = sorted(
                    [MissionEvent(base - i, EventKind.COMMAND, f"c{i}") for i in range(n_cmd)]
                    + [MissionEvent(base - 100 - i, EventKind.ALARM, f"a{i}") for i in range(n_alarm)],
                    key=lambda e: e.tick,
                )
                eff_alarms = n_alarm if inside and now - (base - 100) <= window else 0
                eff_cmds = n_cmd if inside else 0
                expected = (
                    4 if eff_alarms >= 2 else 3 if eff_alarms == 1 else 2 if eff_cmds else 1
                )
                got = classify_windowed(log, now).discrete_level
                assert got == expected, (n_cmd, n_alarm, inside, got, expected)
                checked += 1
    elapsed = time.perf_counter() - t0
    report("windowed level-criteria conformance", checked == 32 and elapsed < 1.0,
           f"{checked} cases in {elapsed:.3f}s")


def test_c2_continuous_oracle_equivalence():
    """Incremental estimator == brute-force sum, 100 random logs, 1e-9 rel."""
    t0 = time.perf_counter()
    rng = random.Random(20240)
    worst = 0.0
    for trial in range(100):
        n = rng.randint(0, 10_000)
        ticks = sorted(rng.randint(0, 50_000) for _ in range(n))
        kinds = [rng.choice((EventKind.COMMAND, EventKind.ALARM)) for _ in range(n)]
        tracker = WorkloadTracker()
        for tick, kind in zip(ticks, kinds):
            tracker.append(MissionEvent(tick, kind, "x"))
        now = (ticks[-1] if ticks else 0) + rng.randint(0, 1000)
        got = tracker.continuous(now)
        want = brute_force_workload(
            [(tick, kind.value) for tick, kind in zip(ticks, kinds)],
            now, tracker.params.w_cmd, tracker.params.w_alarm, tracker.params.half_life,
        )
        err = abs(got - want) / max(abs(want), 1e-12)
        worst = max(worst, err)
        assert err <= 1e-9, f"trial {trial}: relative error {err}"
    elapsed = time.perf_counter() - t0
    report("continuous estimator oracle equivalence", elapsed < 10.0,
           f"worst rel err {worst:.2e}, {elapsed:.2f}s")


def test_c3_canonical_agreement():
    """Default parameters: both methods agree on the four canonical bursts."""
    agreement = calibrate_agreement()
    levels = [(c.windowed_level, c.continuous_level) for c in agreement.cases]
    report("canonical windowed/continuous agreement",
           agreement.all_agree and [w for w, _ in levels] == [1, 2, 3, 4],
           f"levels {levels}")


def _patrol_run(policy: str, seed: int, ticks: int = 5000, grid: int = 64) -> float:
    field = PheromoneField(grid, grid, cell_size=25.0, params=FieldParams())
    world = World(field, params=SwarmParams(patrol_policy=policy), seed=seed)
    for i in range(12):  # launch apron by the base: two rows of six
        world.add_vehicle(Vehicle(
            id=f"uav{i:02d}", x=150.0 + 30.0 * (i % 6), y=180.0 + 30.0 * (i // 6),
            speed=20.0, sensor_radius=40.0,
        ))
    metrics = MetricsCollector(n_cells=grid * grid)
    for _ in range(ticks):
        metrics.record_scans(world.tick + 1, world.step().scanned)
    return metrics.coverage().mean_revisit


def test_c4_patrol_beats_random_walk_on_every_seed():
    """12 UAVs, 64x64, 5000 ticks: pheromone <= 0.8 x random walk, 5 seeds, <60s."""
    t0 = time.perf_counter()
    ratios = []
    for seed in range(5):
        pheromone = _patrol_run("pheromone", seed)
        walk = _patrol_run("random_walk", seed)
        ratios.append(pheromone / walk)
    elapsed = time.perf_counter() - t0
    report("patrol beats random-walk baseline", max(ratios) <= 0.8 and elapsed < 60.0,
           f"ratios {['%.2f' % r for r in ratios]}, {elapsed:.1f}s")


def test_c5_islet_reproduction_and_unreachability():
    """A mid-mission no-fly ring yields an anomaly within 500 ticks, and the
    gradient never targets an enclosed cell (checked exhaustively per tick)."""
    ring = [[r, c] for r in (9, 12) for c in (9, 10, 11, 12)] + \
           [[r, c] for r in (10, 11) for c in (9, 12)]
    interior = {(10, 10), (10, 11), (11, 10), (11, 11)}
    ring_tick = 120
    doc = {
        "name": "islet-acceptance",
        "map": {"width": 20, "height": 20, "cell_size": 25.0},
        "field": {"anomaly_threshold_factor": 4.0, "anomaly_min_age": 30},
        "no_fly": [{"tick": ring_tick, "cells": ring}],
        "vehicles": [
            {"id": f"uav{i}", "x": 80.0 + 50.0 * i, "y": 80.0} for i in range(4)
        ],
    }
    scenario = parse_scenario(doc)
    radius = scenario.swarm_params.gradient_radius
    violations = []

    def check_every_open_cell(runtime, _output):
        if runtime.world.tick <= ring_tick:
            return
        field = runtime.world.field
        for r in range(20):
            for c in range(20):
                if field.blocked[r, c] or (r, c) in interior:
                    continue
                if field.gradient_target((r, c), radius) in interior:
                    violations.append((runtime.world.tick, (r, c)))

    result = run_headless(scenario, 0, ring_tick + 500, on_tick=check_every_open_cell)
    anomaly_ticks = [
        json.loads(line)["tick"]
        for line in result.log_lines
        if json.loads(line)["category"] == "anomaly"
    ]
    detected_in_time = any(ring_tick < t <= ring_tick + 500 for t in anomaly_ticks)
    report("islet anomaly + gradient unreachability",
           detected_in_time and not violations,
           f"anomaly at {anomaly_ticks[:1] or 'never'}, violations {len(violations)}")


def test_c6_pursue_completion_pipeline():
    """Underspecified pursue: unique read, one direction request, accepted command."""
    field = PheromoneField(20, 20, cell_size=25.0)
    world = World(field, seed=0)
    world.add_vehicle(Vehicle("uav0", 230.0, 230.0, 20.0, 40.0))  # two near the zone,
    world.add_vehicle(Vehicle("uav1", 270.0, 240.0, 20.0, 40.0))
    world.add_vehicle(Vehicle("uav2", 60.0, 60.0, 20.0, 40.0))  # one clearly out of it
    zone = SearchZone("z1", "north", 250.0, 250.0, math.pi / 2, 150.0, direction=None)
    world.add_zone(zone)
    ctx = DialogueContext(
        vehicles=world.vehicles, zones=world.zones,
        beacons=BeaconRegistry(world.map_width, world.map_height),
        alarms=[], now=10, recency_window=120,
        blocked=field.blocked, cell_size=25.0,
        map_width=world.map_width, map_height=world.map_height,
    )
    session = DialogueSession()
    first = session.handle_utterance(
        OperatorUtterance("two uavs pursue zone north", 10),
        ctx, WorkloadState(1.0, 2, CONTINUOUS),
    )
    unique_then_request = (
        first.plan is None
        and first.request is not None
        and first.request.slot_names() == ("direction",)
        and session.pending.interpretation.confidence is Confidence.UNIQUE
    )
    done = session.handle_completion({"direction": 60.0}, ctx)
    command = done.plan.commands[0] if done.plan else None
    if command is not None:
        for action in done.plan.actions:
            if action.kind == "set_zone_direction":
                world.zones[action.payload["zone_id"]].direction = action.payload["direction"]
    dispatched = command is not None and world.dispatch(command)
    one_round = done.record is not None and done.record.rounds == 1
    report("pursue completion pipeline, one clarification round",
           unique_then_request and isinstance(command, PursueCommand)
           and dispatched and one_round,
           f"rounds={done.record.rounds if done.record else '?'}")


def test_c7_burden_monotone_and_critical_floor():
    """Exhaustive over levels 1-4: burden never rises, criticals never gated."""
    policy = default_policy()
    burdens = [policy.for_level(level).burden for level in (1, 2, 3, 4)]
    monotone = all(b1 >= b2 for b1, b2 in zip(burdens, burdens[1:]))
    critical_ok = True
    for level in (1, 2, 3, 4):
        generation = policy.for_level(level).generation
        for confirmation in (False, True):
            emission = Emission("critical notice", Severity.CRITICAL, confirmation=confirmation)
            critical_ok &= decide_emission(emission, generation).emit
    for generation in GenStrategy:  # all strategies, not just the policy rows
        critical_ok &= decide_emission(
            Emission("x", Severity.CRITICAL), generation).emit
    report("burden monotonicity + critical floor", monotone and critical_ok,
           f"burdens {burdens}")


def test_c8_determinism_and_replay_on_random_scenarios():
    """20 random scenarios: two runs give identical digests; replay verifies."""
    failures = []
    for seed in range(20):
        rng = random.Random(31_000 + seed)
        scenario = parse_scenario(random_scenario(rng))
        first = run_headless(scenario, seed, 80)
        second = run_headless(scenario, seed, 80)
        if first.log_digest != second.log_digest:
            failures.append((seed, "digest mismatch"))
            continue
        verdict = replay(first.log_lines, scenario)
        if not verdict.ok or verdict.partial:
            failures.append((seed, "replay failed"))
    report("determinism + replay on 20 random scenarios", not failures, str(failures or "all ok"))


def test_c9_mode_table_totality_and_authority():
    """10k random activations: table stays total, authority never violated."""
    table = default_mode_table()
    rng = random.Random(777)
    keys = list(table.cells)
    last_set_by = {key: None for key in keys}  # independent authority oracle
    violations = []
    for op in range(10_000):
        key = keys[rng.randrange(len(keys))]
        task, stage = key
        modes = table.cells[key]
        mode = modes[rng.randrange(len(modes))]
        requester = Requester.OPERATOR if rng.random() < 0.5 else Requester.SYSTEM
        policy = table.selection[key]
        if policy is SelectionPolicy.OPERATOR_SELECTS:
            allowed = requester is Requester.OPERATOR
        elif policy is SelectionPolicy.SYSTEM_SELECTS:
            allowed = requester is Requester.SYSTEM
        else:
            allowed = not (
                requester is Requester.SYSTEM and last_set_by[key] is Requester.OPERATOR
            )
        change = table.activate_mode(task, stage, mode.id, requester, tick=op)
        if table.validate() != []:
            violations.append((op, "table not total"))
            break
        if change is not None and change.applied:
            if not allowed:
                violations.append((op, "unauthorized change applied"))
                break
            last_set_by[key] = requester
        elif change is not None and allowed and table.active[key] != mode.id:
            violations.append((op, "authorized change refused"))
            break
    report("mode-table totality + authority soundness", not violations,
           str(violations or "10000 ops clean"))
