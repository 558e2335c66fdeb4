/**
 * Entity symbology on the map canvas.
 *
 * Drawing goes through the Canvas2D subset below so tests can hand in a
 * recording stub. Patrolling vehicles are triangles, pursuing ones are
 * double chevrons, goto vehicles are squares; alarms are diamonds with a
 * "!" when recent; same-intruder alarms are joined by dotted lines; zones
 * are sector wedges; beacons are flagged circles.
 */

import { MapTransform, toPixel, zoneWedge } from "./geometry.js";
import { alarmLinks, ViewState } from "./state.js";

export interface Canvas2DLike {
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
  set strokeStyle(v: string);
  set fillStyle(v: string);
  set lineWidth(v: number);
  set font(v: string);
}

const COLORS = {
  patrol: "#7dd3a0",
  pursue: "#f2a65a",
  goto: "#7aa7e8",
  alarm: "#e85454",
  alarmLink: "#e88f8f",
  zone: "rgba(242, 166, 90, 0.25)",
  zoneEdge: "#f2a65a",
  beacon: "#d9c96a",
  selection: "#ffffff",
};

function drawVehicle(
  ctx: Canvas2DLike,
  t: MapTransform,
  x: number,
  y: number,
  behavior: string,
  selected: boolean,
): void {
  const [px, py] = toPixel(t, x, y);
  const s = 6;
  ctx.setLineDash([]);
  ctx.fillStyle = COLORS[behavior as keyof typeof COLORS] ?? COLORS.patrol;
  ctx.beginPath();
  if (behavior === "pursue") {
    ctx.moveTo(px - s, py + s);
    ctx.lineTo(px, py - s);
    ctx.lineTo(px + s, py + s);
    ctx.lineTo(px, py + s / 3);
    ctx.closePath();
  } else if (behavior === "goto") {
    ctx.rect(px - s * 0.8, py - s * 0.8, s * 1.6, s * 1.6);
  } else {
    ctx.moveTo(px, py - s);
    ctx.lineTo(px + s, py + s);
    ctx.lineTo(px - s, py + s);
    ctx.closePath();
  }
  ctx.fill();
  if (selected) {
    ctx.strokeStyle = COLORS.selection;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.arc(px, py, s + 3, 0, Math.PI * 2);
    ctx.stroke();
  }
}

function drawAlarm(
  ctx: Canvas2DLike,
  t: MapTransform,
  x: number,
  y: number,
  recent: boolean,
): void {
  const [px, py] = toPixel(t, x, y);
  const s = 6;
  ctx.setLineDash([]);
  ctx.fillStyle = COLORS.alarm;
  ctx.beginPath();
  ctx.moveTo(px, py - s);
  ctx.lineTo(px + s, py);
  ctx.lineTo(px, py + s);
  ctx.lineTo(px - s, py);
  ctx.closePath();
  ctx.fill();
  if (recent) {
    ctx.fillStyle = "#ffffff";
    ctx.font = "bold 11px sans-serif";
    ctx.fillText("!", px + s + 2, py - 2);
  }
}

export function drawView(ctx: Canvas2DLike, state: ViewState, t: MapTransform): void {
  // zones first, under everything else
  for (const zone of state.zones) {
    const wedge = zoneWedge(zone);
    const [cx, cy] = toPixel(t, wedge.cx, wedge.cy);
    const radius = wedge.radius * t.scale;
    ctx.setLineDash([]);
    ctx.fillStyle = COLORS.zone;
    ctx.strokeStyle = COLORS.zoneEdge;
    ctx.lineWidth = 1;
    ctx.beginPath();
    if (wedge.fullCircle) {
      ctx.arc(cx, cy, radius, 0, Math.PI * 2);
    } else {
      ctx.moveTo(cx, cy);
      ctx.arc(cx, cy, radius, wedge.startAngle, wedge.endAngle);
      ctx.closePath();
    }
    ctx.fill();
    ctx.stroke();
  }

  for (const beacon of state.beacons) {
    const [px, py] = toPixel(t, beacon.x, beacon.y);
    ctx.setLineDash([]);
    ctx.fillStyle = COLORS.beacon;
    ctx.beginPath();
    ctx.arc(px, py, 4, 0, Math.PI * 2);
    ctx.fill();
    ctx.font = "10px sans-serif";
    ctx.fillText(beacon.label, px + 6, py + 3);
  }

  // dotted links between same-intruder alarms, then the alarms themselves
  ctx.strokeStyle = COLORS.alarmLink;
  ctx.lineWidth = 1.5;
  ctx.setLineDash([4, 4]);
  for (const [parent, child] of alarmLinks(state.alarms)) {
    const [x1, y1] = toPixel(t, parent.x, parent.y);
    const [x2, y2] = toPixel(t, child.x, child.y);
    ctx.beginPath();
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
    ctx.stroke();
  }
  for (const alarm of state.alarms) {
    drawAlarm(ctx, t, alarm.x, alarm.y, alarm.recent);
  }

  for (const vehicle of state.vehicles) {
    drawVehicle(ctx, t, vehicle.x, vehicle.y, vehicle.behavior,
      state.selected.includes(vehicle.id));
  }
}
