import { describe, expect, it } from "vitest";

import { makeForm, validateForm } from "../src/forms.js";
import { SlotPayload } from "../src/protocol.js";

const directionSlot: SlotPayload = {
  name: "direction", kind: "angle_deg", prompt: "zone direction (degrees)?", choices: [],
};
const pointSlot: SlotPayload = {
  name: "destination", kind: "point", prompt: "where?", choices: [],
};
const choiceSlot: SlotPayload = {
  name: "choice", kind: "choice", prompt: "which vehicles?",
  choices: ["uav1, uav2", "uav1, uav3"],
};

describe("completion forms", () => {
  it("blocks submission while a required slot is empty", () => {
    const form = makeForm("c-1", "", [directionSlot, pointSlot]);
    form.values.direction = "45";
    const check = validateForm(form);
    expect(check.ok).toBe(false);
    expect(check.missing).toEqual(["destination"]);
  });

  it("parses angles, points, and waypoint lists", () => {
    const waypointSlot: SlotPayload = {
      name: "waypoints", kind: "waypoints", prompt: "route?", choices: [],
    };
    const form = makeForm("c-2", "", [directionSlot, pointSlot, waypointSlot]);
    form.values.direction = "132.5";
    form.values.destination = "800, 450";
    form.values.waypoints = "100 100, 200 150, 300 150";
    const check = validateForm(form);
    expect(check.ok).toBe(true);
    expect(check.parsed.direction).toBe(132.5);
    expect(check.parsed.destination).toEqual([800, 450]);
    expect(check.parsed.waypoints).toEqual([[100, 100], [200, 150], [300, 150]]);
  });

  it("accepts a choice by index or by exact text", () => {
    const byIndex = makeForm("c-3", "", [choiceSlot]);
    byIndex.values.choice = "1";
    expect(validateForm(byIndex).parsed.choice).toBe(1);

    const byText = makeForm("c-4", "", [choiceSlot]);
    byText.values.choice = "uav1, uav2";
    expect(validateForm(byText).parsed.choice).toBe("uav1, uav2");

    const bad = makeForm("c-5", "", [choiceSlot]);
    bad.values.choice = "7";
    expect(validateForm(bad).ok).toBe(false);
  });

  it("rejects garbage numbers", () => {
    const form = makeForm("c-6", "", [directionSlot]);
    form.values.direction = "north-ish";
    expect(validateForm(form).ok).toBe(false);
  });
});
