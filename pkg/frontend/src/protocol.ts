// Wire types for the session service (one JSON frame per message) and the
// mapping from UI control events onto protocol messages. Everything here is
// pure data plumbing: the client never computes game matrices, it only
// forwards parameters and renders what snapshots say.

export type Axis = "x" | "y" | "z";

export type StepObj =
  | { kind: "translate"; v: [number, number, number] }
  | { kind: "rotate"; axis: Axis; angle: number }
  | { kind: "scale"; factor: number };

export interface PoseErrorObj {
  translation: number;
  rotation: number;
  scale: number;
  total: number;
}

export type AnnotationObj =
  | { kind: "dimension_line"; from: number[]; to: number[]; label: number }
  | {
      kind: "rotation_arc";
      center: number[];
      axis: Axis;
      radius: number;
      start_angle: number;
      sweep: number;
      label: number;
    }
  | { kind: "axis_highlight"; axis: Axis; plane_normal: Axis }
  | { kind: "mapped_point"; pre: number[]; img: number[]; index: number };

export interface FrameObj {
  role: "world" | "pre_image" | "image" | "virtual";
  origin: number[];
  basis: number[];
}

export interface PanelRowObj {
  cells: number[];
  highlight: string[];
  theme: "physical" | "virtual_green";
}

export interface PanelObj {
  rows: PanelRowObj[];
  expansion: unknown;
}

export interface Snapshot {
  type?: "snapshot";
  engine_version: string;
  puzzle_id: string;
  level: "motion" | "mapping" | "function";
  status: "playing" | "solved";
  move_count: number;
  solid_model_pose: number[];
  virtual_model_pose: number[];
  error: PoseErrorObj;
  frames: FrameObj[];
  wireframe: [number[], number[]][];
  annotations: AnnotationObj[];
  panel: PanelObj | null;
}

export interface HintReply {
  type: "hint";
  step: StepObj;
  residual_after: number;
}

export interface ErrorReply {
  type: "error";
  code: string;
  message: string;
  sequence_no: number | null;
}

export type Reply = (Snapshot & { type: "snapshot" }) | HintReply | ErrorReply;

export type Message =
  | { type: "new_session"; puzzle: string }
  | { type: "physical_step"; step: StepObj }
  | { type: "virtual_step"; step: StepObj }
  | { type: "edit_param"; field: string; value: number }
  | { type: "undo" }
  | { type: "reset" }
  | { type: "hint_request" };

// -- control events ----------------------------------------------------------

export type ActiveControl = "translate" | "rotate_x" | "rotate_y" | "rotate_z" | "scale";

export type ControlEvent =
  | { kind: "drag"; mode: "translate"; delta: [number, number, number] }
  | { kind: "drag"; mode: "rotate_x" | "rotate_y" | "rotate_z"; degrees: number }
  | { kind: "logo_tap" }
  | { kind: "slider_change"; field: string; value: number }
  | { kind: "undo" }
  | { kind: "reset" }
  | { kind: "hint_request" };

/** What the last applied virtual step looks like, for edit-vs-append routing. */
export interface StepContext {
  lastStep: { kind: "translate" | "rotate" | "scale"; axis?: Axis } | null;
  activeControl: ActiveControl;
}

export const snapHalfStud = (v: number): number => Math.round(v * 2) / 2;
export const snapAngle = (deg: number): number => Math.round(deg / 15) * 15;

const SLIDER_FIELD_OWNER: Record<string, "translate" | "rotate" | "scale"> = {
  x: "translate",
  y: "translate",
  z: "translate",
  angle: "rotate",
  factor: "scale",
};

function sliderStep(field: string, value: number, control: ActiveControl): StepObj {
  if (field === "angle") {
    const axis = (control.startsWith("rotate") ? control.slice(-1) : "z") as Axis;
    return { kind: "rotate", axis, angle: value };
  }
  if (field === "factor") return { kind: "scale", factor: value };
  const v: [number, number, number] = [0, 0, 0];
  v[{ x: 0, y: 1, z: 2 }[field as Axis]] = value;
  return { kind: "translate", v };
}

/**
 * Map one control event to at most one protocol message.
 *
 * Logo taps are local (they cycle the active control and re-skin the panel
 * from state the client already has) and produce no message. Slider changes
 * edit the active step when the field belongs to it, otherwise they start a
 * new virtual step. Physical drags snap to half studs / 15 degrees.
 */
export function toMessage(event: ControlEvent, ctx: StepContext): Message | null {
  switch (event.kind) {
    case "drag": {
      if (event.mode === "translate") {
        const [x, y, z] = event.delta;
        return {
          type: "physical_step",
          step: { kind: "translate", v: [snapHalfStud(x), snapHalfStud(y), snapHalfStud(z)] },
        };
      }
      const axis = event.mode.slice(-1) as Axis;
      return {
        type: "physical_step",
        step: { kind: "rotate", axis, angle: snapAngle(event.degrees) },
      };
    }
    case "logo_tap":
      return null;
    case "slider_change": {
      const owner = SLIDER_FIELD_OWNER[event.field];
      const last = ctx.lastStep;
      const editable =
        last !== null &&
        last.kind === owner &&
        (owner !== "rotate" ||
          !ctx.activeControl.startsWith("rotate") ||
          last.axis === (ctx.activeControl.slice(-1) as Axis));
      if (editable) {
        return { type: "edit_param", field: event.field, value: event.value };
      }
      return { type: "virtual_step", step: sliderStep(event.field, event.value, ctx.activeControl) };
    }
    case "undo":
      return { type: "undo" };
    case "reset":
      return { type: "reset" };
    case "hint_request":
      return { type: "hint_request" };
  }
}

export function parseReply(line: string): Reply {
  const obj = JSON.parse(line) as Reply;
  if (obj.type !== "snapshot" && obj.type !== "hint" && obj.type !== "error") {
    throw new Error(`unexpected reply type ${(obj as { type?: string }).type}`);
  }
  return obj;
}
