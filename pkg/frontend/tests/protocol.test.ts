import { describe, expect, it } from "vitest";

import {
  type ControlEvent,
  type StepContext,
  snapAngle,
  snapHalfStud,
  toMessage,
} from "../src/protocol.js";

const freshCtx: StepContext = { lastStep: null, activeControl: "translate" };

describe("control event mapping", () => {
  it("maps a translate drag to one snapped physical_step", () => {
    const message = toMessage(
      { kind: "drag", mode: "translate", delta: [1.26, -0.2, 0] },
      freshCtx,
    );
    expect(message).toEqual({
      type: "physical_step",
      step: { kind: "translate", v: [1.5, -0, 0] },
    });
  });

  it("maps a rotate drag to a 15-degree-snapped physical_step", () => {
    const message = toMessage({ kind: "drag", mode: "rotate_z", degrees: 52 }, freshCtx);
    expect(message).toEqual({
      type: "physical_step",
      step: { kind: "rotate", axis: "z", angle: 45 },
    });
  });

  it("logo taps are local only", () => {
    expect(toMessage({ kind: "logo_tap" }, freshCtx)).toBeNull();
  });

  it("slider change with no active step starts a virtual step", () => {
    const message = toMessage({ kind: "slider_change", field: "x", value: 2 }, freshCtx);
    expect(message).toEqual({
      type: "virtual_step",
      step: { kind: "translate", v: [2, 0, 0] },
    });
  });

  it("slider change edits the active step when the field belongs to it", () => {
    const ctx: StepContext = { lastStep: { kind: "translate" }, activeControl: "translate" };
    expect(toMessage({ kind: "slider_change", field: "x", value: 2 }, ctx)).toEqual({
      type: "edit_param",
      field: "x",
      value: 2,
    });
  });

  it("rotation slider starts a new step when the axis changed", () => {
    const ctx: StepContext = {
      lastStep: { kind: "rotate", axis: "z" },
      activeControl: "rotate_x",
    };
    expect(toMessage({ kind: "slider_change", field: "angle", value: 30 }, ctx)).toEqual({
      type: "virtual_step",
      step: { kind: "rotate", axis: "x", angle: 30 },
    });
  });

  it("rotation slider edits when the axis matches", () => {
    const ctx: StepContext = {
      lastStep: { kind: "rotate", axis: "x" },
      activeControl: "rotate_x",
    };
    expect(toMessage({ kind: "slider_change", field: "angle", value: 30 }, ctx)).toEqual({
      type: "edit_param",
      field: "angle",
      value: 30,
    });
  });

  it("simple events map one-to-one", () => {
    const cases: [ControlEvent, string][] = [
      [{ kind: "undo" }, "undo"],
      [{ kind: "reset" }, "reset"],
      [{ kind: "hint_request" }, "hint_request"],
    ];
    for (const [event, type] of cases) {
      expect(toMessage(event, freshCtx)).toEqual({ type });
    }
  });
});

describe("snapping", () => {
  it("snaps to half studs", () => {
    expect(snapHalfStud(0.74)).toBe(0.5);
    expect(snapHalfStud(0.76)).toBe(1);
    expect(snapHalfStud(-1.2)).toBe(-1);
  });

  it("snaps to 15-degree increments", () => {
    expect(snapAngle(52)).toBe(45);
    expect(snapAngle(53)).toBe(60);
    expect(snapAngle(-8)).toBe(-15);
  });
});
