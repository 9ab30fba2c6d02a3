#!/usr/bin/env node
/**
 * remanopt-figures: publication-style SVGs from remanopt CSV outputs.
 *
 * Usage:
 *   remanopt-figures render --spec fig.json
 *   remanopt-figures selection-map  selection_map.csv -o map.svg
 *   remanopt-figures dynamics       market_dynamics.csv --column total_delta -o dyn.svg
 *   remanopt-figures impact         environmental_impact_*.csv -o ei.svg
 *   remanopt-figures stochastic     stochastic_compare.csv --column profit_delta -o st.svg
 *   remanopt-figures contract-lines contract_sweep.csv [--column impact] -o fees.svg
 */

import * as fs from "fs";

import { FigureSpec, writeFigure } from "./render";

function fail(message: string): never {
  process.stderr.write(`error: ${message}\n`);
  process.exit(1);
}

function arg(argv: string[], flag: string, fallback?: string): string {
  const i = argv.indexOf(flag);
  if (i >= 0 && i + 1 < argv.length) return argv[i + 1];
  if (fallback !== undefined) return fallback;
  fail(`missing ${flag}`);
}

export function main(argv: string[]): void {
  const [command, ...rest] = argv;
  if (!command) {
    fail("no command; see the header of this file for usage");
  }
  let spec: FigureSpec;
  switch (command) {
    case "render": {
      const specPath = arg(rest, "--spec");
      spec = JSON.parse(fs.readFileSync(specPath, "utf-8")) as FigureSpec;
      break;
    }
    case "selection-map":
      spec = {
        input: rest[0] ?? fail("selection-map needs a CSV path"),
        kind: "selection-map",
        output: arg(rest, "-o", "selection_map.svg"),
      };
      break;
    case "dynamics":
      spec = {
        input: rest[0] ?? fail("dynamics needs a CSV path"),
        kind: "heatmap",
        column: arg(rest, "--column", "total_delta"),
        title: "Market dynamics vs new-only baseline",
        scale: "diverging",
        output: arg(rest, "-o", "market_dynamics.svg"),
      };
      break;
    case "impact":
      spec = {
        input: rest[0] ?? fail("impact needs a CSV path"),
        kind: "heatmap",
        column: arg(rest, "--column", "impact"),
        title: "Environmental impact",
        scale: "sequential",
        output: arg(rest, "-o", "environmental_impact.svg"),
      };
      break;
    case "stochastic":
      spec = {
        input: rest[0] ?? fail("stochastic needs a CSV path"),
        kind: "heatmap",
        column: arg(rest, "--column", "profit_delta"),
        title: "Stochastic vs constant market size",
        scale: "diverging",
        output: arg(rest, "-o", "stochastic_compare.svg"),
      };
      break;
    case "contract-lines":
      spec = {
        input: rest[0] ?? fail("contract-lines needs a CSV path"),
        kind: "lines",
        column: arg(rest, "--column", "system_profit"),
        output: arg(rest, "-o", "contract_sweep.svg"),
      };
      break;
    default:
      fail(`unknown command ${command}`);
  }
  try {
    writeFigure(spec);
    process.stdout.write(`wrote ${spec.output}\n`);
  } catch (err) {
    fail(err instanceof Error ? err.message : String(err));
  }
}

if (require.main === module) {
  main(process.argv.slice(2));
}
