/**
 * Reader for remanopt CSV emissions: "#"-prefixed preamble lines (library
 * version + config echo), then a header row and data rows.
 */

import * as fs from "fs";

export interface Table {
  header: string[];
  rows: string[][];
  preamble: string[];
}

export function readCsv(path: string): Table {
  const text = fs.readFileSync(path, "utf-8");
  const preamble: string[] = [];
  let header: string[] | null = null;
  const rows: string[][] = [];
  for (const line of text.split("\n")) {
    if (line === "") continue;
    if (line.startsWith("#")) {
      preamble.push(line);
      continue;
    }
    const parts = line.split(",");
    if (header === null) {
      header = parts;
    } else {
      rows.push(parts);
    }
  }
  if (header === null) {
    throw new Error(`${path}: no CSV header found`);
  }
  return { header, rows, preamble };
}

export function columnIndex(table: Table, name: string): number {
  const i = table.header.indexOf(name);
  if (i < 0) {
    throw new Error(
      `column "${name}" not in header [${table.header.join(", ")}]`,
    );
  }
  return i;
}

export function numericColumn(table: Table, name: string): number[] {
  const i = columnIndex(table, name);
  return table.rows.map((row) => {
    const v = Number(row[i]);
    if (Number.isNaN(v)) {
      throw new Error(`column "${name}" has non-numeric value "${row[i]}"`);
    }
    return v;
  });
}

export function stringColumn(table: Table, name: string): string[] {
  const i = columnIndex(table, name);
  return table.rows.map((row) => row[i]);
}
