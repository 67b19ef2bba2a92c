// Canvas heatmap: U-matrix as gray levels, component planes through the
// shared colormap, item dots on top.

import { Bundle } from "./bundle.js";
import { colorAt } from "./colormap.js";
import { View } from "./state.js";

export const CELL_PX = 28;
export const DOT_RADIUS_FRACTION = 0.3;

const FALLBACK_PALETTE = [
  "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/** Cells of the active view, all mapped into [0, 1]. */
export function viewLevels(bundle: Bundle, view: View): number[][] {
  if (view.kind === "component") {
    const plane: number[][] = [];
    for (let r = 0; r < bundle.rows; r++) {
      const row: number[] = [];
      for (let c = 0; c < bundle.cols; c++) {
        row.push(bundle.pointers[r * bundle.cols + c][view.feature]);
      }
      plane.push(row);
    }
    return plane;
  }
  let peak = 0;
  for (const row of bundle.umatrix) {
    for (const v of row) peak = Math.max(peak, v);
  }
  return bundle.umatrix.map((row) => row.map((v) => (peak > 0 ? v / peak : 0)));
}

function cssColor(level: number, view: View): string {
  if (view.kind === "component") {
    const [r, g, b] = colorAt(level);
    return `rgb(${r}, ${g}, ${b})`;
  }
  const gray = Math.floor(level * 255 + 0.5);
  return `rgb(${gray}, ${gray}, ${gray})`;
}

function labelColor(label: string, assigned: Map<string, string>): string {
  let color = assigned.get(label);
  if (color === undefined) {
    const valid = typeof CSS !== "undefined" && CSS.supports?.("color", label);
    color = valid ? label : FALLBACK_PALETTE[assigned.size % FALLBACK_PALETTE.length];
    assigned.set(label, color);
  }
  return color;
}

export interface DrawOptions {
  showItems: boolean;
  selected: { row: number; col: number } | null;
}

export function drawMap(canvas: HTMLCanvasElement, bundle: Bundle, view: View, options: DrawOptions): void {
  canvas.width = bundle.cols * CELL_PX;
  canvas.height = bundle.rows * CELL_PX;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;

  const levels = viewLevels(bundle, view);
  for (let r = 0; r < bundle.rows; r++) {
    for (let c = 0; c < bundle.cols; c++) {
      ctx.fillStyle = cssColor(levels[r][c], view);
      ctx.fillRect(c * CELL_PX, r * CELL_PX, CELL_PX, CELL_PX);
    }
  }

  if (options.showItems) {
    const assigned = new Map<string, string>();
    for (const item of bundle.items) {
      const row = Math.floor(item.bmu / bundle.cols);
      const col = item.bmu % bundle.cols;
      ctx.fillStyle = labelColor(item.label, assigned);
      ctx.beginPath();
      ctx.arc((col + 0.5) * CELL_PX, (row + 0.5) * CELL_PX, CELL_PX * DOT_RADIUS_FRACTION, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  if (options.selected) {
    ctx.strokeStyle = "#ff3b6b";
    ctx.lineWidth = 2;
    ctx.strokeRect(options.selected.col * CELL_PX + 1, options.selected.row * CELL_PX + 1, CELL_PX - 2, CELL_PX - 2);
  }
}

/** Map a pointer event position to a cell, or null when outside the grid. */
export function cellAt(canvas: HTMLCanvasElement, bundle: Bundle, clientX: number, clientY: number): { row: number; col: number } | null {
  const rect = canvas.getBoundingClientRect();
  const x = ((clientX - rect.left) / rect.width) * canvas.width;
  const y = ((clientY - rect.top) / rect.height) * canvas.height;
  const col = Math.floor(x / CELL_PX);
  const row = Math.floor(y / CELL_PX);
  if (row < 0 || row >= bundle.rows || col < 0 || col >= bundle.cols) {
    return null;
  }
  return { row, col };
}
