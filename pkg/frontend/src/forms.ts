/** Completion-request forms: slot values, validation, response payloads. */

import { SlotPayload } from "./protocol.js";

export interface FormModel {
  cid: string | null;
  note: string;
  slots: SlotPayload[];
  values: Record<string, string>;
}

export function makeForm(
  cid: string | null,
  note: string,
  slots: SlotPayload[],
): FormModel {
  return { cid, note, slots, values: {} };
}

export interface FormCheck {
  ok: boolean;
  missing: string[];
  parsed: Record<string, unknown>;
}

/** Parse typed slot values; every slot is required before submission. */
export function validateForm(form: FormModel): FormCheck {
  const missing: string[] = [];
  const parsed: Record<string, unknown> = {};
  for (const slot of form.slots) {
    const raw = (form.values[slot.name] ?? "").trim();
    if (!raw) {
      missing.push(slot.name);
      continue;
    }
    switch (slot.kind) {
      case "angle_deg": {
        const angle = Number(raw);
        if (Number.isNaN(angle)) missing.push(slot.name);
        else parsed[slot.name] = angle;
        break;
      }
      case "point": {
        const parts = raw.split(/[\s,]+/).map(Number);
        if (parts.length !== 2 || parts.some(Number.isNaN)) missing.push(slot.name);
        else parsed[slot.name] = parts;
        break;
      }
      case "waypoints": {
        const nums = raw.split(/[\s,;]+/).map(Number);
        if (nums.length < 2 || nums.length % 2 !== 0 || nums.some(Number.isNaN)) {
          missing.push(slot.name);
        } else {
          const points: number[][] = [];
          for (let i = 0; i < nums.length; i += 2) points.push([nums[i], nums[i + 1]]);
          parsed[slot.name] = points;
        }
        break;
      }
      case "choice": {
        const index = Number(raw);
        if (!Number.isNaN(index) && index >= 0 && index < slot.choices.length) {
          parsed[slot.name] = index;
        } else if (slot.choices.includes(raw)) {
          parsed[slot.name] = raw;
        } else {
          missing.push(slot.name);
        }
        break;
      }
      default:
        parsed[slot.name] = raw;
    }
  }
  return { ok: missing.length === 0, missing, parsed };
}
