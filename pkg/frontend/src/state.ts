/**
 * Console view state: a pure fold over received frames.
 *
 * Everything the console shows lives here and is derived exclusively from
 * frames; nothing mutates mission state locally. Replaying the same frame
 * backlog from the initial state therefore reproduces the identical view,
 * which is what reconnection does.
 */

import {
  AlarmPayload,
  BeaconPayload,
  CompletionRequestPayload,
  EmissionPayload,
  Frame,
  ModeTablePayload,
  ProtocolError,
  SnapshotPayload,
  VehiclePayload,
  WorkloadPayload,
  ZonePayload,
  decodeBitset,
  decodeGrid,
} from "./protocol.js";

export const EMISSION_FEED_LIMIT = 50;
export const EVENT_FEED_LIMIT = 100;

export interface FieldView {
  width: number;
  height: number;
  cellSize: number;
  urgencyQ: Uint16Array;
  urgencyMax: number;
  presenceQ: Uint16Array;
  presenceMax: number;
  blocked: Uint8Array;
}

export interface FeedEmission {
  tick: number;
  text: string;
  severity: string;
  kind: string;
  cid: string | null;
}

export interface FeedEvent {
  tick: number;
  type: string;
  detail: Record<string, unknown>;
}

export interface PendingForm {
  cid: string | null;
  intent: string | null;
  note: string;
  slots: CompletionRequestPayload["slots"];
}

export interface Overlays {
  urgency: boolean;
  presence: boolean;
  blocked: boolean;
}

export interface ViewState {
  tick: number;
  lastSeq: number;
  field: FieldView | null;
  vehicles: VehiclePayload[];
  alarms: AlarmPayload[];
  zones: ZonePayload[];
  beacons: BeaconPayload[];
  workload: WorkloadPayload | null;
  strategy: { interpretation: string; generation: string } | null;
  modeTable: ModeTablePayload | null;
  emissions: FeedEmission[];
  events: FeedEvent[];
  pendingForm: PendingForm | null;
  pendingCids: string[];
  proposals: { task: string; stage: string; mode_id: string }[];
  selected: string[];
  overlays: Overlays;
  errorBanner: string | null;
}

export function initialState(): ViewState {
  return {
    tick: 0,
    lastSeq: 0,
    field: null,
    vehicles: [],
    alarms: [],
    zones: [],
    beacons: [],
    workload: null,
    strategy: null,
    modeTable: null,
    emissions: [],
    events: [],
    pendingForm: null,
    pendingCids: [],
    proposals: [],
    selected: [],
    overlays: { urgency: true, presence: false, blocked: true },
    errorBanner: null,
  };
}

function applySnapshot(state: ViewState, frame: Frame): void {
  const body = frame.payload as unknown as SnapshotPayload;
  const f = body.field;
  const cells = f.width * f.height;
  const urgencyQ = decodeGrid(f.urgency, state.field?.urgencyQ ?? null, cells);
  const presenceQ = decodeGrid(f.presence, state.field?.presenceQ ?? null, cells);
  state.field = {
    width: f.width,
    height: f.height,
    cellSize: f.cell_size,
    urgencyQ,
    urgencyMax: f.urgency.max,
    presenceQ,
    presenceMax: f.presence.max,
    blocked: decodeBitset(f.blocked, cells),
  };
  state.vehicles = body.vehicles;
  state.alarms = body.alarms;
  state.zones = body.zones;
  state.beacons = body.beacons;
  state.workload = body.workload;
  state.strategy = body.strategy;
  state.modeTable = body.mode_table;
  state.selected = state.selected.filter((id) =>
    body.vehicles.some((v) => v.id === id) || body.beacons.some((b) => b.id === id),
  );
}

function clearPending(state: ViewState, cid: string | null): void {
  if (cid !== null) {
    state.pendingCids = state.pendingCids.filter((c) => c !== cid);
  }
}

/**
 * Fold one frame into the view. Returns the same state object (mutated);
 * a malformed frame flips the error banner and leaves the view intact.
 */
export function applyFrame(state: ViewState, frame: Frame): ViewState {
  try {
    switch (frame.kind) {
      case "snapshot":
        applySnapshot(state, frame);
        break;
      case "event": {
        const type = String(frame.payload.type ?? "event");
        state.events.push({ tick: frame.tick, type, detail: frame.payload });
        if (state.events.length > EVENT_FEED_LIMIT) {
          state.events.splice(0, state.events.length - EVENT_FEED_LIMIT);
        }
        break;
      }
      case "emission": {
        const body = frame.payload as unknown as EmissionPayload;
        clearPending(state, body.cid);
        if (body.kind !== "receipt") {
          state.emissions.push({
            tick: frame.tick,
            text: body.text,
            severity: body.severity,
            kind: body.kind,
            cid: body.cid,
          });
          if (state.emissions.length > EMISSION_FEED_LIMIT) {
            state.emissions.splice(0, state.emissions.length - EMISSION_FEED_LIMIT);
          }
        }
        break;
      }
      case "completion_request": {
        const body = frame.payload as unknown as CompletionRequestPayload;
        clearPending(state, body.cid);
        state.pendingForm = {
          cid: body.cid,
          intent: body.intent,
          note: body.note,
          slots: body.slots,
        };
        break;
      }
      case "mode_change": {
        const task = String(frame.payload.task);
        const stage = String(frame.payload.stage);
        const modeId = String(frame.payload.mode_id);
        const applied = Boolean(frame.payload.applied);
        clearPending(state, (frame.payload.cid as string | null) ?? null);
        if (applied && state.modeTable) {
          for (const cell of state.modeTable.cells) {
            if (cell.task === task && cell.stage === stage) cell.active = modeId;
          }
        } else if (!applied) {
          state.proposals.push({ task, stage, mode_id: modeId });
        }
        break;
      }
      case "error": {
        const cid = (frame.payload.cid as string | null) ?? null;
        clearPending(state, cid);
        state.errorBanner = String(frame.payload.error ?? "protocol error");
        break;
      }
      default:
        throw new ProtocolError(`unexpected frame kind ${frame.kind}`);
    }
    state.tick = Math.max(state.tick, frame.tick);
    state.lastSeq = frame.seq;
  } catch (err) {
    state.errorBanner = err instanceof Error ? err.message : String(err);
  }
  return state;
}

/** Rebuild a view from scratch by replaying a frame backlog. */
export function replayBacklog(frames: Frame[]): ViewState {
  const state = initialState();
  for (const frame of frames) applyFrame(state, frame);
  return state;
}

/** Mark an outbound correlation id as awaiting its response. */
export function trackPending(state: ViewState, cid: string): void {
  if (!state.pendingCids.includes(cid)) state.pendingCids.push(cid);
}

/** Dotted links between alarms the gateway chained as "same intruder". */
export function alarmLinks(alarms: AlarmPayload[]): [AlarmPayload, AlarmPayload][] {
  const byId = new Map(alarms.map((a) => [a.id, a]));
  const links: [AlarmPayload, AlarmPayload][] = [];
  for (const alarm of alarms) {
    if (alarm.linked_to !== null) {
      const parent = byId.get(alarm.linked_to);
      if (parent) links.push([parent, alarm]);
    }
  }
  return links;
}

/** Comparable projection of a view, for replay-determinism checks. */
export function viewFingerprint(state: ViewState): string {
  const field = state.field;
  return JSON.stringify({
    tick: state.tick,
    lastSeq: state.lastSeq,
    field: field
      ? {
          w: field.width,
          h: field.height,
          urgencyMax: field.urgencyMax,
          urgencySum: field.urgencyQ.reduce((a, b) => a + b, 0),
          presenceSum: field.presenceQ.reduce((a, b) => a + b, 0),
          blockedSum: field.blocked.reduce((a, b) => a + b, 0),
        }
      : null,
    vehicles: state.vehicles,
    alarms: state.alarms,
    zones: state.zones,
    beacons: state.beacons,
    workload: state.workload,
    strategy: state.strategy,
    modeTable: state.modeTable,
    emissions: state.emissions,
    events: state.events,
    pendingForm: state.pendingForm,
    pendingCids: state.pendingCids,
    proposals: state.proposals,
    errorBanner: state.errorBanner,
  });
}
