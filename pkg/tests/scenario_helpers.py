"""Scenario documents used across gateway and acceptance tests."""

from __future__ import annotations

import random


def minimal_scenario(**overrides) -> dict:
    doc = {
        "name": "minimal",
        "map": {"width": 16, "height": 16, "cell_size": 25.0},
        "vehicles": [
            {"id": "uav1", "x": 100.0, "y": 100.0},
            {"id": "uav2", "x": 140.0, "y": 100.0},
        ],
    }
    doc.update(overrides)
    return doc


def two_intruder_scenario() -> dict:
    """Two parked sentries; two intruders stroll straight through their view."""
    return {
        "name": "two-intruders",
        "map": {"width": 24, "height": 24, "cell_size": 25.0},
        "vehicles": [
            {"id": "uav1", "x": 150.0, "y": 300.0, "speed": 0.001, "sensor_radius": 60.0},
            {"id": "uav2", "x": 450.0, "y": 300.0, "speed": 0.001, "sensor_radius": 60.0},
        ],
        "intruders": [
            {"id": "i1", "speed": 10.0, "start_tick": 20,
             "path": [[150.0, 30.0], [150.0, 570.0]]},
            {"id": "i2", "speed": 10.0, "start_tick": 60,
             "path": [[450.0, 30.0], [450.0, 570.0]]},
        ],
    }


def random_scenario(rng: random.Random) -> dict:
    """Small random but valid scenario for determinism/replay sweeps."""
    width = rng.randint(10, 18)
    height = rng.randint(10, 18)
    cell = 25.0
    map_w, map_h = width * cell, height * cell

    def pt():
        return [round(rng.uniform(30, map_w - 30), 1), round(rng.uniform(30, map_h - 30), 1)]

    vehicles = [
        {
            "id": f"uav{i}",
            "x": pt()[0],
            "y": pt()[1],
            "speed": round(rng.uniform(10, 30), 1),
            "sensor_radius": round(rng.uniform(30, 60), 1),
        }
        for i in range(rng.randint(2, 5))
    ]
    intruders = [
        {
            "id": f"i{i}",
            "speed": round(rng.uniform(5, 15), 1),
            "start_tick": rng.randint(0, 60),
            "path": [pt() for _ in range(rng.randint(2, 4))],
        }
        for i in range(rng.randint(0, 2))
    ]
    script = []
    if vehicles and rng.random() < 0.8:
        target = pt()
        script.append(
            {"tick": rng.randint(5, 50),
             "text": f"{vehicles[0]['id']} goto {target[0]:.0f} {target[1]:.0f}"}
        )
    no_fly = []
    if rng.random() < 0.5:
        r0 = rng.randint(0, height - 3)
        c0 = rng.randint(0, width - 3)
        no_fly.append({"tick": rng.randint(0, 40), "rect": [r0, c0, r0 + 1, c0 + 1]})
    false_alarms = []
    if rng.random() < 0.5:
        false_alarms.append({"tick": rng.randint(10, 80), "x": pt()[0], "y": pt()[1]})
    return {
        "name": f"random-{rng.randint(0, 10**6)}",
        "map": {"width": width, "height": height, "cell_size": cell},
        "vehicles": vehicles,
        "intruders": intruders,
        "operator_script": script,
        "no_fly": no_fly,
        "false_alarms": false_alarms,
    }
