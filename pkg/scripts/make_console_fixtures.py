"""Capture real gateway frames into fixtures for the console test suite.

Runs a small scripted mission through the actual runtime and frame
encoders, so the console is tested against the genuine wire format rather
than hand-typed approximations. Regenerate with:

    python scripts/make_console_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from swarmpatrol.gateway import parse_scenario, protocol
from swarmpatrol.gateway.runtime import Inbound, MissionRuntime, TickOutput

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"

# Parked sentries (speed ~0) keep referent geometry deterministic: uav1/uav2
# are the clear nearest pair for the zone, uav3 is far off; both intruders
# stroll through a sentry's sensor to raise alarms close enough to link.
SCENARIO = {
    "name": "console-fixture",
    "map": {"width": 24, "height": 24, "cell_size": 25.0},
    "field": {"anomaly_threshold_factor": 4.0, "anomaly_min_age": 20},
    "no_fly": [{"cells": [[r, c] for r in (6, 9) for c in (6, 7, 8, 9)]
                + [[r, c] for r in (7, 8) for c in (6, 9)]}],
    "vehicles": [
        {"id": "uav1", "x": 150.0, "y": 160.0, "speed": 0.001},
        {"id": "uav2", "x": 210.0, "y": 170.0, "speed": 0.001},
        {"id": "uav3", "x": 520.0, "y": 530.0, "speed": 0.001},
    ],
    "intruders": [
        {"id": "i1", "speed": 10.0, "start_tick": 5,
         "path": [[150.0, 30.0], [150.0, 580.0]]},
        {"id": "i2", "speed": 12.0, "start_tick": 30,
         "path": [[520.0, 440.0], [520.0, 580.0]]},
    ],
    "zones": [{"id": "z1", "label": "north", "cx": 200.0, "cy": 200.0,
               "breadth_deg": 90.0, "range": 120.0}],
    "beacons": [{"label": "alpha", "x": 220.0, "y": 300.0}],
}


class FrameRecorder:
    def __init__(self, runtime: MissionRuntime) -> None:
        self.runtime = runtime
        self.encoder = protocol.GridStreamEncoder(full_every=5)
        self.seq = 0
        self.frames: list[dict] = []

    def frame(self, kind: str, payload: dict) -> dict:
        self.seq += 1
        return json.loads(
            protocol.make_frame(self.seq, self.runtime.world.tick, kind, payload).to_json()
        )

    def snapshot(self) -> None:
        self.frames.append(
            self.frame(protocol.SNAPSHOT, self.runtime.snapshot_payload(self.encoder))
        )

    def absorb(self, output: TickOutput) -> None:
        for payload in output.events:
            self.frames.append(self.frame(protocol.EVENT, payload))
        for payload in output.mode_changes:
            self.frames.append(self.frame(protocol.MODE_CHANGE, payload))
        for payload in output.requests:
            self.frames.append(self.frame(protocol.COMPLETION_REQUEST, payload))
        for payload in output.emissions:
            self.frames.append(self.frame(protocol.EMISSION, payload))
        for payload in output.errors:
            self.frames.append(self.frame(protocol.ERROR, payload))
        self.snapshot()


def capture_session() -> list[dict]:
    runtime = MissionRuntime(parse_scenario(SCENARIO), seed=4)
    rec = FrameRecorder(runtime)
    rec.snapshot()  # the on-connect hello

    script: dict[int, Inbound] = {
        3: Inbound(protocol.UTTERANCE, {"text": "uav1 goto beacon alpha", "cid": "fx-1"}, "fx-1"),
        8: Inbound(protocol.UTTERANCE, {"text": "two uavs pursue zone north", "cid": "fx-2"}, "fx-2"),
        10: Inbound(protocol.COMPLETION_RESPONSE,
                    {"cid": "fx-2", "values": {"direction": 90.0}}, "fx-2"),
        14: Inbound(protocol.MODE_CHANGE,
                    {"task": "patrol", "stage": "act", "mode_id": "patrol-act-manual",
                     "requester": "operator", "cid": "fx-3"}, "fx-3"),
        16: Inbound(protocol.UTTERANCE, {"text": "open the pod bay doors", "cid": "fx-4"}, "fx-4"),
        18: Inbound("bogus_kind", {"cid": "fx-5"}, "fx-5"),
    }
    for tick in range(1, 60):
        if tick in script:
            runtime.submit(script[tick])
        rec.absorb(runtime.tick())
    return rec.frames


def capture_verbosity_levels() -> dict[str, list[dict]]:
    """Per workload level: the emission stream one alarm + one ack produce."""
    from swarmpatrol.dialogue import Emission, Severity, default_policy, decide_emission

    policy = default_policy()
    probe = [
        Emission("roger: uav1 goto alpha", Severity.INFO, confirmation=True, kind="ack", cid="q-1"),
        Emission("status: all vehicles nominal", Severity.INFO, kind="status"),
        Emission("dark spot: 4 cells unreachable", Severity.WARNING, kind="anomaly"),
        Emission("ALARM at (120, 260)", Severity.CRITICAL, kind="alarm"),
    ]
    out: dict[str, list[dict]] = {}
    for level in (1, 2, 3, 4):
        generation = policy.for_level(level).generation
        frames = []
        seq = 0
        for emission in probe:
            decision = decide_emission(emission, generation)
            payload = {
                "text": emission.text, "severity": emission.severity.value,
                "kind": emission.kind, "cid": emission.cid,
            }
            if not decision.emit and emission.cid is not None:
                payload = {"text": "", "severity": "info", "kind": "receipt",
                           "cid": emission.cid}
            elif not decision.emit:
                continue
            seq += 1
            frames.append({"seq": seq, "tick": 1, "kind": "emission", "payload": payload})
        out[str(level)] = frames
    return out


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    session = capture_session()
    (FIXTURE_DIR / "session.json").write_text(json.dumps(session, indent=1), encoding="utf-8")
    kinds = sorted({f["kind"] for f in session})
    (FIXTURE_DIR / "verbosity.json").write_text(
        json.dumps(capture_verbosity_levels(), indent=1), encoding="utf-8"
    )
    print(f"wrote {len(session)} frames covering kinds: {', '.join(kinds)}")


if __name__ == "__main__":
    main()
