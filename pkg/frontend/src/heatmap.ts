/** Pheromone grids to RGBA pixel buffers (one pixel per cell). */

import { FieldView } from "./state.js";

/**
 * Compose the enabled overlays into a cell-resolution RGBA image. Urgency
 * burns yellow-to-red against the snapshot max, presence glows cyan,
 * blocked cells are solid slate. The caller scales it up to canvas size
 * with image smoothing off so cells stay crisp.
 */
export function heatmapPixels(
  field: FieldView,
  overlays: { urgency: boolean; presence: boolean; blocked: boolean },
): Uint8ClampedArray {
  const cells = field.width * field.height;
  const out = new Uint8ClampedArray(cells * 4);
  for (let i = 0; i < cells; i++) {
    let r = 16;
    let g = 24;
    let b = 32;
    let a = 255;
    if (overlays.urgency && field.urgencyMax > 0) {
      const u = field.urgencyQ[i] / 65535;
      r = Math.min(255, r + u * 235);
      g = Math.min(255, g + u * 140);
    }
    if (overlays.presence && field.presenceMax > 0) {
      const p = field.presenceQ[i] / 65535;
      g = Math.min(255, g + p * 120);
      b = Math.min(255, b + p * 200);
    }
    if (overlays.blocked && field.blocked[i]) {
      r = 70;
      g = 74;
      b = 82;
    }
    out[i * 4] = r;
    out[i * 4 + 1] = g;
    out[i * 4 + 2] = b;
    out[i * 4 + 3] = a;
  }
  return out;
}
