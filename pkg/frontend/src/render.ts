// Canvas adapter: walks a draw list. No game knowledge lives here.

import type { Draw2D } from "./sceneView.js";

export function paint(canvas: HTMLCanvasElement, draws: Draw2D[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "12px ui-monospace, monospace";
  for (const d of draws) {
    if (d.kind === "line") {
      ctx.globalAlpha = d.alpha;
      ctx.strokeStyle = d.color;
      ctx.lineWidth = d.width;
      ctx.setLineDash(d.dash ? [5, 4] : []);
      ctx.beginPath();
      ctx.moveTo(d.a[0], d.a[1]);
      ctx.lineTo(d.b[0], d.b[1]);
      ctx.stroke();
    } else if (d.kind === "point") {
      ctx.globalAlpha = 1;
      ctx.setLineDash([]);
      ctx.beginPath();
      ctx.arc(d.at[0], d.at[1], d.radius, 0, 2 * Math.PI);
      if (d.filled) {
        ctx.fillStyle = d.color;
        ctx.fill();
      } else {
        ctx.strokeStyle = d.color;
        ctx.lineWidth = 1.5;
        ctx.stroke();
      }
    } else {
      ctx.globalAlpha = 1;
      ctx.setLineDash([]);
      ctx.fillStyle = d.color;
      ctx.fillText(d.text, d.at[0], d.at[1]);
    }
  }
  ctx.globalAlpha = 1;
  ctx.setLineDash([]);
}
