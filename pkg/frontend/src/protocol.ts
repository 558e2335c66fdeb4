/**
 * Gateway wire format: frame types and grid decoding.
 *
 * Mirrors docs/protocol.md. Scalar grids arrive quantized to uint16 against
 * a per-snapshot max, either full or as sparse deltas relative to the last
 * quantized array; the no-fly mask is a base64 bitset.
 */

export type FrameKind =
  | "snapshot"
  | "event"
  | "emission"
  | "completion_request"
  | "mode_change"
  | "error"
  | "utterance"
  | "completion_response"
  | "command";

export interface Frame {
  seq: number;
  tick: number;
  kind: FrameKind;
  payload: Record<string, unknown>;
}

export interface GridPayload {
  mode: "full" | "delta";
  max: number;
  values?: number[];
  changes?: [number, number][];
}

export interface FieldPayload {
  width: number;
  height: number;
  cell_size: number;
  urgency: GridPayload;
  presence: GridPayload;
  blocked: string;
}

export interface VehiclePayload {
  id: string;
  x: number;
  y: number;
  behavior: "patrol" | "pursue" | "goto";
  zone_id: string | null;
  fuel: number | null;
}

export interface AlarmPayload {
  id: number;
  x: number;
  y: number;
  tick: number;
  linked_to: number | null;
  recent: boolean;
}

export interface ZonePayload {
  id: string;
  label: string;
  cx: number;
  cy: number;
  direction: number | null;
  breadth: number;
  range: number;
}

export interface BeaconPayload {
  id: string;
  label: string;
  x: number;
  y: number;
}

export interface WorkloadPayload {
  continuous: number;
  discrete_windowed: number;
  discrete_continuous: number;
  method: "windowed" | "continuous";
}

export interface ModeCellPayload {
  task: string;
  stage: string;
  modes: { id: string; authority: string; description: string }[];
  active: string;
  selection: string;
}

export interface ModeTablePayload {
  tasks: string[];
  cells: ModeCellPayload[];
}

export interface SnapshotPayload {
  field: FieldPayload;
  vehicles: VehiclePayload[];
  alarms: AlarmPayload[];
  zones: ZonePayload[];
  beacons: BeaconPayload[];
  workload: WorkloadPayload;
  strategy: { interpretation: string; generation: string };
  mode_table: ModeTablePayload;
}

export interface SlotPayload {
  name: string;
  kind: "point" | "angle_deg" | "waypoints" | "choice" | "zone" | "vehicles";
  prompt: string;
  choices: string[];
}

export interface CompletionRequestPayload {
  cid: string | null;
  intent: string | null;
  note: string;
  slots: SlotPayload[];
}

export interface EmissionPayload {
  text: string;
  severity: "info" | "warning" | "critical";
  kind: string;
  cid: string | null;
}

export class ProtocolError extends Error {}

export function parseFrame(raw: string): Frame {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    throw new ProtocolError("frame is not valid JSON");
  }
  if (typeof obj !== "object" || obj === null) {
    throw new ProtocolError("frame must be an object");
  }
  const record = obj as Record<string, unknown>;
  for (const field of ["seq", "tick", "kind", "payload"]) {
    if (!(field in record)) throw new ProtocolError(`frame lacks field ${field}`);
  }
  if (typeof record.payload !== "object" || record.payload === null) {
    throw new ProtocolError("frame payload must be an object");
  }
  return {
    seq: Number(record.seq),
    tick: Number(record.tick),
    kind: String(record.kind) as FrameKind,
    payload: record.payload as Record<string, unknown>,
  };
}

/** Apply a full or delta grid payload on top of the previous quantized array. */
export function decodeGrid(
  payload: GridPayload,
  previous: Uint16Array | null,
  cells: number,
): Uint16Array {
  if (payload.mode === "full") {
    if (!payload.values || payload.values.length !== cells) {
      throw new ProtocolError(`full grid of wrong size`);
    }
    return Uint16Array.from(payload.values);
  }
  if (!previous) throw new ProtocolError("delta grid without a previous full grid");
  const next = previous.slice();
  for (const [index, value] of payload.changes ?? []) {
    if (index < 0 || index >= cells) throw new ProtocolError("delta index out of range");
    next[index] = value;
  }
  return next;
}

/** Quantized uint16 array back to floats via the payload max. */
export function dequantize(q: Uint16Array, max: number): Float64Array {
  const out = new Float64Array(q.length);
  if (max > 0) {
    const scale = max / 65535;
    for (let i = 0; i < q.length; i++) out[i] = q[i] * scale;
  }
  return out;
}

export function decodeBitset(encoded: string, cells: number): Uint8Array {
  const binary = atob(encoded);
  const out = new Uint8Array(cells);
  for (let i = 0; i < cells; i++) {
    const byte = binary.charCodeAt(i >> 3);
    out[i] = (byte >> (7 - (i & 7))) & 1;
  }
  return out;
}

export function makeUtteranceFrame(
  seq: number,
  text: string,
  cid: string,
  gesture?: { kind: "click" | "drag"; x: number; y: number; x2?: number; y2?: number },
): Frame {
  const payload: Record<string, unknown> = { text, cid };
  if (gesture) payload.gesture = gesture;
  return { seq, tick: 0, kind: "utterance", payload };
}

export function makeCompletionResponseFrame(
  seq: number,
  cid: string,
  values: Record<string, unknown>,
): Frame {
  return { seq, tick: 0, kind: "completion_response", payload: { cid, values } };
}

export function makeModeChangeFrame(
  seq: number,
  cid: string,
  task: string,
  stage: string,
  modeId: string,
): Frame {
  return {
    seq,
    tick: 0,
    kind: "mode_change",
    payload: { cid, task, stage, mode_id: modeId, requester: "operator" },
  };
}
