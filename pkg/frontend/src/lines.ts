/**
 * Contract-sweep line charts: one polyline per one-time fee level, with the
 * coordination case as a dashed reference line.
 */

import { Table, numericColumn, stringColumn } from "./csv";
import { Svg } from "./svg";

const MARGIN = { left: 84, right: 170, top: 44, bottom: 56 };
const W = 460;
const H = 330;

const SERIES_COLORS = ["#4878a8", "#e69138", "#6aa84f", "#a64d79", "#674ea7"];

export function renderContractLines(table: Table, column: "system_profit" | "impact"): string {
  const kinds = stringColumn(table, "kind");
  const hs = numericColumn(table, "h");
  const Hs = numericColumn(table, "H");
  const ys = numericColumn(table, column);

  const sweepIdx = kinds
    .map((k, i) => (k === "coordination" ? -1 : i))
    .filter((i) => i >= 0);
  if (sweepIdx.length === 0) {
    throw new Error("contract sweep contains no fee rows");
  }
  const coordIdx = kinds.indexOf("coordination");
  const levels = [...new Set(sweepIdx.map((i) => Hs[i]))].sort((a, b) => a - b);

  const xs = sweepIdx.map((i) => hs[i]);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  let yLo = Math.min(...sweepIdx.map((i) => ys[i]));
  let yHi = Math.max(...sweepIdx.map((i) => ys[i]));
  if (coordIdx >= 0) {
    yLo = Math.min(yLo, ys[coordIdx]);
    yHi = Math.max(yHi, ys[coordIdx]);
  }
  const pad = (yHi - yLo) * 0.06 || 1;
  yLo -= pad;
  yHi += pad;

  const px = (h: number) => MARGIN.left + ((h - xLo) / (xHi - xLo || 1)) * W;
  const py = (v: number) => MARGIN.top + H - ((v - yLo) / (yHi - yLo)) * H;

  const svg = new Svg(MARGIN.left + W + MARGIN.right, MARGIN.top + H + MARGIN.bottom);
  const title = column === "system_profit" ? "Total system profit" : "Environmental impact";
  svg.text(MARGIN.left + W / 2, 24, `${title} by authorization fees`, 15, "middle");
  svg.text(MARGIN.left + W / 2, MARGIN.top + H + 40, "unit fee h", 13, "middle");

  // axes ticks
  for (let i = 0; i <= 4; i++) {
    const h = xLo + ((xHi - xLo) * i) / 4;
    svg.line(px(h), MARGIN.top + H, px(h), MARGIN.top + H + 5, "#333333");
    svg.text(px(h), MARGIN.top + H + 20, h.toFixed(0), 11, "middle");
    const v = yLo + ((yHi - yLo) * i) / 4;
    svg.line(MARGIN.left - 5, py(v), MARGIN.left, py(v), "#333333");
    svg.text(MARGIN.left - 9, py(v) + 4, v.toPrecision(5), 11, "end");
  }
  svg.line(MARGIN.left, MARGIN.top, MARGIN.left, MARGIN.top + H, "#333333");
  svg.line(MARGIN.left, MARGIN.top + H, MARGIN.left + W, MARGIN.top + H, "#333333");

  if (coordIdx >= 0) {
    svg.polyline(
      [
        [px(xLo), py(ys[coordIdx])],
        [px(xHi), py(ys[coordIdx])],
      ],
      "#666666",
      1.5,
      "6 4",
    );
  }
  levels.forEach((level, li) => {
    const pts = sweepIdx
      .filter((i) => Hs[i] === level)
      .sort((a, b) => hs[a] - hs[b])
      .map((i): [number, number] => [px(hs[i]), py(ys[i])]);
    svg.polyline(pts, SERIES_COLORS[li % SERIES_COLORS.length], 2);
  });

  const lx = MARGIN.left + W + 24;
  levels.forEach((level, li) => {
    const y = MARGIN.top + 18 + li * 24;
    svg.line(lx, y, lx + 22, y, SERIES_COLORS[li % SERIES_COLORS.length], 2);
    svg.text(lx + 30, y + 4, `one-time fee H = ${level.toFixed(0)}`, 12);
  });
  if (coordIdx >= 0) {
    const y = MARGIN.top + 18 + levels.length * 24;
    svg.line(lx, y, lx + 22, y, "#666666", 1.5, "6 4");
    svg.text(lx + 30, y + 4, "coordination case", 12);
  }
  return svg.render();
}
