/**
 * Perception-plane heatmaps: one rectangle per (alpha, |beta|) cell, colored
 * categorically (best model) or by a numeric column (impacts, deltas).
 */

import { Table, columnIndex, numericColumn, stringColumn } from "./csv";
import { MODEL_COLORS, Svg, divergingColor, sequentialColor } from "./svg";

const MARGIN = { left: 64, right: 150, top: 44, bottom: 56 };
const PLOT = 440;

interface Grid {
  alphas: number[];
  betas: number[];
  cellOf: Map<string, number>; // "alpha|beta" -> row index
}

function buildGrid(table: Table): Grid {
  const alphas = [...new Set(numericColumn(table, "alpha"))].sort((a, b) => a - b);
  const betas = [...new Set(numericColumn(table, "beta_mag"))].sort((a, b) => a - b);
  const ai = columnIndex(table, "alpha");
  const bi = columnIndex(table, "beta_mag");
  const cellOf = new Map<string, number>();
  table.rows.forEach((row, i) => cellOf.set(`${Number(row[ai])}|${Number(row[bi])}`, i));
  if (alphas.length === 0 || betas.length === 0 || cellOf.size === 0) {
    throw new Error("empty perception grid");
  }
  return { alphas, betas, cellOf };
}

function frame(svg: Svg, grid: Grid, title: string): void {
  const x0 = MARGIN.left;
  const y0 = MARGIN.top;
  svg.text(x0 + PLOT / 2, 24, title, 15, "middle");
  svg.text(x0 + PLOT / 2, y0 + PLOT + 40, "willingness-to-pay discount α", 13, "middle");
  svg.text(18, y0 + PLOT / 2, "perception effect |β|", 13, "middle", -90);
  for (const a of [0, 0.25, 0.5, 0.75, 1.0]) {
    const x = x0 + a * PLOT;
    svg.line(x, y0 + PLOT, x, y0 + PLOT + 5, "#333333");
    svg.text(x, y0 + PLOT + 20, a.toFixed(2), 11, "middle");
    const y = y0 + PLOT - a * PLOT;
    svg.line(x0 - 5, y, x0, y, "#333333");
    svg.text(x0 - 9, y + 4, a.toFixed(2), 11, "end");
  }
}

function cellRect(grid: Grid, alpha: number, beta: number): [number, number, number, number] {
  const da = grid.alphas.length > 1 ? PLOT / grid.alphas.length : PLOT;
  const db = grid.betas.length > 1 ? PLOT / grid.betas.length : PLOT;
  const ia = grid.alphas.indexOf(alpha);
  const ib = grid.betas.indexOf(beta);
  const x = MARGIN.left + (ia / grid.alphas.length) * PLOT;
  const y = MARGIN.top + PLOT - ((ib + 1) / grid.betas.length) * PLOT;
  return [x, y, da, db];
}

export function renderSelectionMap(table: Table): string {
  const grid = buildGrid(table);
  const models = stringColumn(table, "best_model");
  const ai = columnIndex(table, "alpha");
  const bi = columnIndex(table, "beta_mag");
  const svg = new Svg(MARGIN.left + PLOT + MARGIN.right, MARGIN.top + PLOT + MARGIN.bottom);
  table.rows.forEach((row, i) => {
    const color = MODEL_COLORS[models[i]];
    if (color === undefined) {
      throw new Error(`unknown model label "${models[i]}"`);
    }
    const [x, y, w, h] = cellRect(grid, Number(row[ai]), Number(row[bi]));
    svg.rect(x, y, w, h, color, ` data-model="${models[i]}"`);
  });
  frame(svg, grid, "Most profitable business model");
  const lx = MARGIN.left + PLOT + 24;
  const labels: Record<string, string> = {
    N: "no remanufacturing",
    O: "in-house",
    T: "licensed third party",
  };
  ["N", "O", "T"].forEach((m, i) => {
    svg.rect(lx, MARGIN.top + 18 + i * 26, 16, 16, MODEL_COLORS[m]);
    svg.text(lx + 24, MARGIN.top + 31 + i * 26, `${m}: ${labels[m]}`, 12);
  });
  return svg.render();
}

export function renderValueHeatmap(
  table: Table,
  column: string,
  title: string,
  scale: "diverging" | "sequential",
): string {
  const grid = buildGrid(table);
  const values = numericColumn(table, column);
  const ai = columnIndex(table, "alpha");
  const bi = columnIndex(table, "beta_mag");
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const color = (v: number) =>
    scale === "diverging" ? divergingColor(v, lo, hi) : sequentialColor(v, lo, hi);
  const svg = new Svg(MARGIN.left + PLOT + MARGIN.right, MARGIN.top + PLOT + MARGIN.bottom);
  table.rows.forEach((row, i) => {
    const [x, y, w, h] = cellRect(grid, Number(row[ai]), Number(row[bi]));
    svg.rect(x, y, w, h, color(values[i]), ` data-value="${values[i]}"`);
  });
  frame(svg, grid, title);
  // vertical color bar with min/mid/max labels
  const bx = MARGIN.left + PLOT + 24;
  const bh = 200;
  const steps = 40;
  for (let i = 0; i < steps; i++) {
    const v = hi - ((hi - lo) * i) / (steps - 1);
    svg.rect(bx, MARGIN.top + 18 + (bh / steps) * i, 18, bh / steps + 0.5, color(v));
  }
  svg.text(bx + 26, MARGIN.top + 28, hi.toPrecision(4), 11);
  svg.text(bx + 26, MARGIN.top + 18 + bh / 2 + 4, ((hi + lo) / 2).toPrecision(4), 11);
  svg.text(bx + 26, MARGIN.top + 18 + bh, lo.toPrecision(4), 11);
  svg.text(bx, MARGIN.top + 18 + bh + 28, column, 11);
  return svg.render();
}
