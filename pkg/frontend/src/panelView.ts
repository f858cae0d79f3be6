// View model for the two matrix rows. Cell values are carried through
// verbatim from the snapshot (the thin-client check compares them 1:1);
// only the display text is derived here.

import type { Snapshot } from "./protocol.js";
import { formatValue } from "./sceneView.js";

export interface PanelCellView {
  value: number; // exactly the snapshot cell
  text: string;
  region: "rotation_scale" | "translation" | "bottom_row";
}

export interface PanelRowView {
  theme: "physical" | "virtual_green";
  cells: PanelCellView[];
}

export interface PanelView {
  rows: PanelRowView[];
}

export function buildPanelView(snap: Snapshot): PanelView | null {
  if (!snap.panel) return null;
  return {
    rows: snap.panel.rows.map((row) => ({
      theme: row.theme,
      cells: row.cells.map((value, i) => ({
        value,
        text: formatValue(value),
        region: row.highlight[i] as PanelCellView["region"],
      })),
    })),
  };
}

/** CSS class for one cell: region shading plus the green second-row theme. */
export function cellClass(cell: PanelCellView, theme: PanelRowView["theme"]): string {
  const classes = ["cell", `region-${cell.region.replace("_", "-")}`];
  if (theme === "virtual_green") classes.push("virtual-green");
  return classes.join(" ");
}
