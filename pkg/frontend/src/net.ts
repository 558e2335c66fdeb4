/**
 * Gateway connection: ordering, correlation, reconnect-with-replay.
 *
 * Frames are applied to the view in seq order; anything that arrives early
 * waits in a hold-back buffer. Every received frame also lands in a backlog
 * so a reconnect can rebuild the identical view by replaying it. While
 * disconnected, at most one outbound frame is queued locally.
 */

import { Frame, parseFrame } from "./protocol.js";
import { applyFrame, initialState, trackPending, ViewState } from "./state.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
}

export type SocketFactory = () => SocketLike;

export class GatewayClient {
  state: ViewState = initialState();
  connected = false;
  backlog: Frame[] = [];

  private socket: SocketLike | null = null;
  private heldBack = new Map<number, Frame>();
  private nextExpectedSeq = 1;
  private outSeq = 0;
  private cidCounter = 0;
  private queuedWhileOffline: Frame | null = null;
  private listeners: (() => void)[] = [];

  constructor(private factory: SocketFactory) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  connect(): void {
    const socket = this.factory();
    this.socket = socket;
    // a fresh session numbers frames from 1 again
    this.nextExpectedSeq = 1;
    this.heldBack.clear();
    socket.onopen = () => {
      this.connected = true;
      // rebuild the view from the retained backlog, then continue live
      this.state = initialState();
      for (const frame of this.backlog) applyFrame(this.state, frame);
      if (this.queuedWhileOffline) {
        socket.send(JSON.stringify(this.queuedWhileOffline));
        this.queuedWhileOffline = null;
      }
      this.notify();
    };
    socket.onmessage = (event) => this.receive(event.data);
    socket.onclose = () => {
      this.connected = false;
      this.socket = null;
      this.notify();
    };
  }

  /** Parse, order, record, and apply one raw frame. */
  receive(raw: string): void {
    let frame: Frame;
    try {
      frame = parseFrame(raw);
    } catch (err) {
      this.state.errorBanner = err instanceof Error ? err.message : String(err);
      this.notify();
      return;
    }
    this.heldBack.set(frame.seq, frame);
    while (this.heldBack.has(this.nextExpectedSeq)) {
      const next = this.heldBack.get(this.nextExpectedSeq)!;
      this.heldBack.delete(this.nextExpectedSeq);
      this.nextExpectedSeq += 1;
      this.backlog.push(next);
      applyFrame(this.state, next);
    }
    this.notify();
  }

  nextCid(): string {
    this.cidCounter += 1;
    return `c-${this.cidCounter}`;
  }

  /** Send a frame, or hold exactly one while disconnected. */
  send(frame: Frame): boolean {
    const cid = (frame.payload.cid as string | undefined) ?? undefined;
    if (this.socket && this.connected) {
      this.outSeq += 1;
      const outbound = { ...frame, seq: this.outSeq };
      this.socket.send(JSON.stringify(outbound));
      if (cid) trackPending(this.state, cid);
      this.notify();
      return true;
    }
    this.queuedWhileOffline = frame; // keep only the latest
    this.notify();
    return false;
  }
}
