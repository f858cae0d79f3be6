// Build a flat draw list from (snapshot, camera, active control). Pure data;
// the canvas adapter just walks the list. Every label's number comes verbatim
// from the snapshot.

import { type OrbitCamera, type Viewport, project, transformPoint } from "./camera.js";
import type { ActiveControl, AnnotationObj, Axis, Snapshot } from "./protocol.js";
import { AXIS_COLORS } from "./controls.js";

export type Draw2D =
  | { kind: "line"; a: [number, number]; b: [number, number]; color: string; width: number; alpha: number; dash: boolean }
  | { kind: "point"; at: [number, number]; color: string; radius: number; filled: boolean }
  | { kind: "label"; at: [number, number]; text: string; color: string };

export function formatValue(v: number): string {
  const rounded = Number(v.toFixed(3));
  return Number.isInteger(rounded) ? rounded.toFixed(1) : String(rounded);
}

const PRE_IMAGE_COLOR = "#9ba1a6";
const PHYSICAL_COLOR = "#e8b63a";
const VIRTUAL_COLOR = "#4cc38a";

interface Ctx {
  cam: OrbitCamera;
  view: Viewport;
  out: Draw2D[];
}

function line3(
  ctx: Ctx,
  a: [number, number, number],
  b: [number, number, number],
  color: string,
  width = 1,
  alpha = 1,
  dash = false,
): void {
  const pa = project(a, ctx.cam, ctx.view);
  const pb = project(b, ctx.cam, ctx.view);
  if (pa && pb) ctx.out.push({ kind: "line", a: pa, b: pb, color, width, alpha, dash });
}

function vec3(xs: number[]): [number, number, number] {
  return [xs[0], xs[1], xs[2]];
}

function drawModel(ctx: Ctx, snap: Snapshot, pose: number[] | null, color: string, width: number, alpha: number): void {
  for (const [a, b] of snap.wireframe) {
    const pa = pose ? transformPoint(pose, vec3(a)) : vec3(a);
    const pb = pose ? transformPoint(pose, vec3(b)) : vec3(b);
    line3(ctx, pa, pb, color, width, alpha);
  }
}

function drawFrames(ctx: Ctx, snap: Snapshot): void {
  const axisDirs: [Axis, [number, number, number]][] = [
    ["x", [2, 0, 0]],
    ["y", [0, 2, 0]],
    ["z", [0, 0, 2]],
  ];
  for (const frame of snap.frames) {
    if (frame.role === "pre_image") continue; // overlaps world for the whole session
    const origin = transformPoint(frame.basis, [0, 0, 0]);
    for (const [axis, dir] of axisDirs) {
      const tip = transformPoint(frame.basis, dir);
      line3(ctx, origin, tip, AXIS_COLORS[axis], frame.role === "world" ? 1 : 2);
    }
  }
}

function arcPoints(a: AnnotationObj & { kind: "rotation_arc" }): [number, number, number][] {
  const points: [number, number, number][] = [];
  const steps = Math.max(2, Math.ceil(Math.abs(a.sweep) / 10));
  for (let i = 0; i <= steps; i++) {
    const t = ((a.start_angle + (a.sweep * i) / steps) * Math.PI) / 180;
    const c = Math.cos(t) * a.radius;
    const s = Math.sin(t) * a.radius;
    // circle in the plane normal to the arc axis
    const local: Record<Axis, [number, number, number]> = {
      x: [0, c, s],
      y: [s, 0, c],
      z: [c, s, 0],
    };
    const p = local[a.axis];
    points.push([a.center[0] + p[0], a.center[1] + p[1], a.center[2] + p[2]]);
  }
  return points;
}

function drawAnnotations(ctx: Ctx, snap: Snapshot): void {
  for (const a of snap.annotations) {
    if (a.kind === "dimension_line") {
      line3(ctx, vec3(a.from), vec3(a.to), "#f2f2f2", 1, 1, true);
      const mid: [number, number, number] = [
        (a.from[0] + a.to[0]) / 2,
        (a.from[1] + a.to[1]) / 2,
        (a.from[2] + a.to[2]) / 2,
      ];
      const at = project(mid, ctx.cam, ctx.view);
      if (at) ctx.out.push({ kind: "label", at, text: formatValue(a.label), color: "#f2f2f2" });
    } else if (a.kind === "rotation_arc") {
      const pts = arcPoints(a);
      for (let i = 1; i < pts.length; i++) {
        line3(ctx, pts[i - 1], pts[i], AXIS_COLORS[a.axis], 2);
      }
      const at = project(pts[Math.floor(pts.length / 2)], ctx.cam, ctx.view);
      if (at) {
        ctx.out.push({ kind: "label", at, text: `${formatValue(a.label)}°`, color: AXIS_COLORS[a.axis] });
      }
    } else if (a.kind === "mapped_point") {
      const pre = project(vec3(a.pre), ctx.cam, ctx.view);
      const img = project(vec3(a.img), ctx.cam, ctx.view);
      if (pre) ctx.out.push({ kind: "point", at: pre, color: PRE_IMAGE_COLOR, radius: 3, filled: false });
      if (img) ctx.out.push({ kind: "point", at: img, color: PHYSICAL_COLOR, radius: 3, filled: true });
      line3(ctx, vec3(a.pre), vec3(a.img), PRE_IMAGE_COLOR, 1, 0.35, true);
      if (img) ctx.out.push({ kind: "label", at: [img[0] + 5, img[1] - 5], text: String(a.index), color: PHYSICAL_COLOR });
    }
  }
}

function drawAxisHighlight(ctx: Ctx, snap: Snapshot, active: ActiveControl): void {
  const explicit = snap.annotations.find((a) => a.kind === "axis_highlight");
  const axis: Axis | null = active.startsWith("rotate")
    ? (active.slice(-1) as Axis)
    : explicit && explicit.kind === "axis_highlight"
      ? explicit.axis
      : null;
  if (!axis) return;
  const color = AXIS_COLORS[axis];
  const dir: Record<Axis, [number, number, number]> = { x: [6, 0, 0], y: [0, 6, 0], z: [0, 0, 6] };
  const d = dir[axis];
  line3(ctx, [-d[0], -d[1], -d[2]], d, color, 3, 0.9);
  // outline of the rotation plane (normal = axis)
  const square: Record<Axis, [number, number, number][]> = {
    x: [[0, -5, -5], [0, 5, -5], [0, 5, 5], [0, -5, 5]],
    y: [[-5, 0, -5], [5, 0, -5], [5, 0, 5], [-5, 0, 5]],
    z: [[-5, -5, 0], [5, -5, 0], [5, 5, 0], [-5, 5, 0]],
  };
  const quad = square[axis];
  for (let i = 0; i < 4; i++) {
    line3(ctx, quad[i], quad[(i + 1) % 4], color, 1, 0.5, true);
  }
}

/**
 * The full frame: pre-image wireframe at rest, solid model at the physical
 * pose, virtual model as a semi-transparent overlay, frames, annotations,
 * and the active-control highlight.
 */
export function buildSceneDrawList(
  snap: Snapshot,
  cam: OrbitCamera,
  view: Viewport,
  active: ActiveControl,
): Draw2D[] {
  const ctx: Ctx = { cam, view, out: [] };
  drawFrames(ctx, snap);
  drawAxisHighlight(ctx, snap, active);
  drawModel(ctx, snap, null, PRE_IMAGE_COLOR, 1, 0.9); // pre-image stays at origin
  drawModel(ctx, snap, snap.solid_model_pose, PHYSICAL_COLOR, 2.5, 1.0);
  drawModel(ctx, snap, snap.virtual_model_pose, VIRTUAL_COLOR, 1.5, 0.55);
  drawAnnotations(ctx, snap);
  return ctx.out;
}
