// Active-control cycling (the transformation logo) and slider definitions.

import type { ActiveControl, Axis } from "./protocol.js";

export const CONTROL_CYCLE: ActiveControl[] = [
  "translate",
  "rotate_x",
  "rotate_y",
  "rotate_z",
  "scale",
];

export function nextControl(current: ActiveControl): ActiveControl {
  const index = CONTROL_CYCLE.indexOf(current);
  return CONTROL_CYCLE[(index + 1) % CONTROL_CYCLE.length];
}

export const AXIS_COLORS: Record<Axis, string> = {
  x: "#e5484d", // red
  y: "#46a758", // green
  z: "#3e63dd", // blue
};

export function logoColor(control: ActiveControl): string {
  if (control.startsWith("rotate")) return AXIS_COLORS[control.slice(-1) as Axis];
  if (control === "scale") return "#f5a623";
  return "#8d8d8d";
}

export interface SliderSpec {
  field: string;
  label: string;
  min: number;
  max: number;
  step: number;
  initial: number;
  color: string;
}

/** Sliders shown for the active control; colors match the coordinate axes. */
export function sliderSpecs(control: ActiveControl): SliderSpec[] {
  if (control === "translate") {
    return (["x", "y", "z"] as Axis[]).map((axis) => ({
      field: axis,
      label: `translate ${axis}`,
      min: -8,
      max: 8,
      step: 0.5,
      initial: 0,
      color: AXIS_COLORS[axis],
    }));
  }
  if (control === "scale") {
    return [{ field: "factor", label: "scale", min: 0.25, max: 4, step: 0.25, initial: 1, color: logoColor(control) }];
  }
  const axis = control.slice(-1) as Axis;
  return [
    {
      field: "angle",
      label: `rotate ${axis}`,
      min: -180,
      max: 180,
      step: 15,
      initial: 0,
      color: AXIS_COLORS[axis],
    },
  ];
}
