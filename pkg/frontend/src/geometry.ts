/** Map-space geometry helpers: zone wedges, drag gestures, symbol anchors. */

import { ZonePayload } from "./protocol.js";

export interface WedgePath {
  cx: number;
  cy: number;
  radius: number;
  startAngle: number;
  endAngle: number;
  fullCircle: boolean;
}

/** Sector outline for a zone; undirected zones render as a full circle. */
export function zoneWedge(zone: ZonePayload): WedgePath {
  const full = zone.direction === null || zone.breadth >= Math.PI * 2 - 1e-9;
  const direction = zone.direction ?? 0;
  return {
    cx: zone.cx,
    cy: zone.cy,
    radius: zone.range,
    startAngle: direction - zone.breadth / 2,
    endAngle: direction + zone.breadth / 2,
    fullCircle: full,
  };
}

export interface DragZoneParams {
  cx: number;
  cy: number;
  directionDeg: number;
  rangeM: number;
}

/** Zone parameters read off a map drag: start = center, vector = direction+range. */
export function dragToZoneParams(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
): DragZoneParams {
  const dx = x2 - x1;
  const dy = y2 - y1;
  return {
    cx: x1,
    cy: y1,
    directionDeg: (Math.atan2(dy, dx) * 180) / Math.PI,
    rangeM: Math.hypot(dx, dy),
  };
}

export interface MapTransform {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
}

export function fitTransform(
  mapWidthM: number,
  mapHeightM: number,
  canvasW: number,
  canvasH: number,
): MapTransform {
  const scale = Math.min(canvasW / mapWidthM, canvasH / mapHeightM);
  return {
    scale,
    offsetX: (canvasW - mapWidthM * scale) / 2,
    offsetY: (canvasH - mapHeightM * scale) / 2,
  };
}

export function toPixel(t: MapTransform, x: number, y: number): [number, number] {
  return [t.offsetX + x * t.scale, t.offsetY + y * t.scale];
}

export function toMap(t: MapTransform, px: number, py: number): [number, number] {
  return [(px - t.offsetX) / t.scale, (py - t.offsetY) / t.scale];
}
