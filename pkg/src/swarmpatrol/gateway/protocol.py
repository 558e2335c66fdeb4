"""Wire format shared by the gateway and the operator console.

Frames are JSON objects {seq, tick, kind, payload}; seq is strictly
increasing per session. Pheromone grids travel as row-major uint16 arrays
quantized against their max (then as sparse deltas between snapshots), the
no-fly mask as a base64 bitset. docs/protocol.md is the normative text;
this module is its reference implementation.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

# frame kinds
SNAPSHOT = "snapshot"
EVENT = "event"
UTTERANCE = "utterance"
COMPLETION_REQUEST = "completion_request"
COMPLETION_RESPONSE = "completion_response"
EMISSION = "emission"
COMMAND = "command"
MODE_CHANGE = "mode_change"
ERROR = "error"

INBOUND_KINDS = (UTTERANCE, COMPLETION_RESPONSE, COMMAND, MODE_CHANGE)
OUTBOUND_KINDS = (SNAPSHOT, EVENT, COMPLETION_REQUEST, EMISSION, MODE_CHANGE, ERROR)


@dataclass(frozen=True)
class Frame:
    seq: int
    tick: int
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {"seq": self.seq, "tick": self.tick, "kind": self.kind, "payload": self.payload},
            separators=(",", ":"),
        )


class FrameError(ValueError):
    """Malformed inbound frame."""


def parse_frame(raw: str | bytes) -> Frame:
    try:
        obj = json.loads(raw)
    except (TypeError, ValueError) as exc:
        raise FrameError(f"frame is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise FrameError("frame must be a JSON object")
    missing = [k for k in ("seq", "tick", "kind", "payload") if k not in obj]
    if missing:
        raise FrameError(f"frame lacks fields: {', '.join(missing)}")
    if obj["kind"] not in INBOUND_KINDS:
        raise FrameError(f"unsupported inbound frame kind: {obj['kind']!r}")
    if not isinstance(obj["payload"], dict):
        raise FrameError("frame payload must be an object")
    return Frame(int(obj["seq"]), int(obj["tick"]), str(obj["kind"]), obj["payload"])


# -- grid encodings -----------------------------------------------------------


def quantize_grid(grid: np.ndarray) -> tuple[np.ndarray, float]:
    """uint16 row-major quantization against the grid max (0 -> all zeros)."""
    peak = float(grid.max()) if grid.size else 0.0
    if peak <= 0.0:
        return np.zeros(grid.size, dtype=np.uint16), 0.0
    q = np.rint(grid.ravel() / peak * 65535.0).astype(np.uint16)
    return q, peak


def encode_grid_full(grid: np.ndarray) -> dict:
    q, peak = quantize_grid(grid)
    return {"mode": "full", "max": peak, "values": q.tolist()}


def encode_grid_delta(q_new: np.ndarray, peak: float, q_old: np.ndarray) -> dict:
    idx = np.nonzero(q_new != q_old)[0]
    return {
        "mode": "delta",
        "max": peak,
        "changes": [[int(i), int(q_new[i])] for i in idx],
    }


def decode_grid(payload: dict, previous_q: Optional[np.ndarray], cells: int) -> np.ndarray:
    """Reconstruct the quantized uint16 array; callers scale by max/65535."""
    if payload["mode"] == "full":
        q = np.asarray(payload["values"], dtype=np.uint16)
        if q.size != cells:
            raise FrameError(f"grid size mismatch: {q.size} != {cells}")
        return q
    if previous_q is None:
        raise FrameError("delta grid without a previous full grid")
    q = previous_q.copy()
    for i, v in payload["changes"]:
        q[int(i)] = np.uint16(v)
    return q


def dequantize(q: np.ndarray, peak: float) -> np.ndarray:
    if peak <= 0.0:
        return np.zeros(q.shape, dtype=np.float64)
    return q.astype(np.float64) * (peak / 65535.0)


def encode_bitset(mask: np.ndarray) -> str:
    return base64.b64encode(np.packbits(mask.ravel().astype(np.uint8)).tobytes()).decode("ascii")


def decode_bitset(encoded: str, cells: int) -> np.ndarray:
    raw = np.frombuffer(base64.b64decode(encoded.encode("ascii")), dtype=np.uint8)
    return np.unpackbits(raw)[:cells].astype(bool)


class GridStreamEncoder:
    """Per-session encoder: full grid periodically, sparse deltas in between."""

    def __init__(self, full_every: int = 10) -> None:
        self.full_every = max(1, full_every)
        self._last_q: dict[str, np.ndarray] = {}
        self._since_full: dict[str, int] = {}

    def encode(self, name: str, grid: np.ndarray) -> dict:
        q, peak = quantize_grid(grid)
        last = self._last_q.get(name)
        since = self._since_full.get(name, self.full_every)
        if last is None or since >= self.full_every:
            payload = {"mode": "full", "max": peak, "values": q.tolist()}
            self._since_full[name] = 1
        else:
            delta = encode_grid_delta(q, peak, last)
            if len(delta["changes"]) * 2 >= q.size:  # delta denser than a full send
                payload = {"mode": "full", "max": peak, "values": q.tolist()}
                self._since_full[name] = 1
            else:
                payload = delta
                self._since_full[name] = since + 1
        self._last_q[name] = q
        return payload


class GridStreamDecoder:
    """Client-side mirror of GridStreamEncoder (used by tests and fixtures)."""

    def __init__(self, cells: int) -> None:
        self.cells = cells
        self._q: dict[str, np.ndarray] = {}

    def decode(self, name: str, payload: dict) -> np.ndarray:
        q = decode_grid(payload, self._q.get(name), self.cells)
        self._q[name] = q
        return dequantize(q, float(payload["max"]))


def make_frame(seq: int, tick: int, kind: str, payload: dict) -> Frame:
    if kind not in OUTBOUND_KINDS:
        raise ValueError(f"not an outbound frame kind: {kind!r}")
    return Frame(seq, tick, kind, payload)
