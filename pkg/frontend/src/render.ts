/**
 * Figure-spec dispatch: a small JSON description selects the figure kind,
 * value column, and color scale for a CSV input.
 */

import * as fs from "fs";
import * as path from "path";

import { readCsv, columnIndex } from "./csv";
import { renderSelectionMap, renderValueHeatmap } from "./heatmap";
import { renderContractLines } from "./lines";

export interface FigureSpec {
  input: string;
  kind: "selection-map" | "heatmap" | "lines";
  output: string;
  column?: string;
  title?: string;
  scale?: "diverging" | "sequential";
}

export function renderSpec(spec: FigureSpec): string {
  const table = readCsv(spec.input);
  if (table.rows.length === 0) {
    throw new Error(`${spec.input}: no data rows`);
  }
  switch (spec.kind) {
    case "selection-map":
      return renderSelectionMap(table);
    case "heatmap": {
      if (!spec.column) throw new Error("heatmap spec needs a value column");
      columnIndex(table, spec.column);
      return renderValueHeatmap(
        table,
        spec.column,
        spec.title ?? spec.column,
        spec.scale ?? "diverging",
      );
    }
    case "lines": {
      const column = spec.column ?? "system_profit";
      if (column !== "system_profit" && column !== "impact") {
        throw new Error(`lines figures plot system_profit or impact, not ${column}`);
      }
      return renderContractLines(table, column);
    }
    default:
      throw new Error(`unknown figure kind ${(spec as FigureSpec).kind}`);
  }
}

export function writeFigure(spec: FigureSpec): void {
  const svg = renderSpec(spec); // render fully before touching the filesystem
  fs.mkdirSync(path.dirname(path.resolve(spec.output)), { recursive: true });
  fs.writeFileSync(spec.output, svg);
}
