#!/usr/bin/env python3
"""Full-resolution selection map (perception step 0.01) and derived metrics.

Writes a pickle of the raw cells plus a summary of the headline metrics.
Multiprocessing-aware; single-process by default on one-core machines.

Usage:
    python scripts/run_full_map.py [--out DIR] [--perception-step S] [--workers N]
"""

import argparse
import pickle
import time
from pathlib import Path

from remanopt.analysis import (
    CONSUMPTION_DOMINANT,
    PRODUCTION_DOMINANT,
    environmental_impact,
    market_dynamics,
    perception_grid,
    selection_map,
    stochastic_vs_constant,
)
from remanopt.market import Contract, CostStructure, MarketParams
from remanopt.models import optimize_model_n


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--perception-step", type=float, default=0.01)
    ap.add_argument("--price-step", type=float, default=0.1)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    params = MarketParams(lam=1000, V=1000, delta=0.8)
    costs = CostStructure(c=200, c_r=80, c_coll=40)
    contract = Contract(H=10000, h=100)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.time()
    grid = perception_grid(args.perception_step)
    cells = selection_map(
        params, costs, contract, grid, grid,
        price_step=args.price_step, workers=args.workers,
    )
    elapsed = time.time() - t0
    print(f"map: {len(cells)} cells in {elapsed:.0f}s "
          f"({elapsed / len(cells) * 1000:.0f} ms/cell)", flush=True)

    with open(out / "selection_map.pkl", "wb") as fh:
        pickle.dump({"cells": cells, "elapsed_s": elapsed,
                     "perception_step": args.perception_step,
                     "price_step": args.price_step}, fh)

    # canonical CSV alongside the pickle (same schema as `remanopt map`)
    from remanopt.cli import MAP_HEADER, RunConfig, write_csv, _map_rows

    cfg = RunConfig(
        perception_step=args.perception_step,
        price_step=args.price_step,
        out_dir=str(out),
    )
    write_csv(out / "selection_map.csv", MAP_HEADER, _map_rows(cells), cfg)

    baseline = optimize_model_n(params, costs, 0.01)
    dyn = [market_dynamics(c, baseline) for c in cells]
    t_rows = [d for d in dyn if d.best_model == "T"]
    if t_rows:
        best_total = max(t_rows, key=lambda d: d.total_delta)
        best_qn = max(t_rows, key=lambda d: d.qn_delta)
        print(f"max total_delta over T cells: {best_total.total_delta:.4f} "
              f"at ({best_total.alpha}, {best_total.beta_mag})", flush=True)
        print(f"max qn_delta over T cells: {best_qn.qn_delta:.4f} "
              f"at ({best_qn.alpha}, {best_qn.beta_mag})", flush=True)

    for name, env in (("production-dominant", PRODUCTION_DOMINANT),
                      ("consumption-dominant", CONSUMPTION_DOMINANT)):
        base_ei = environmental_impact(baseline, env)
        o_above = sum(
            1 for c in cells
            if c.best_model == "O" and environmental_impact(c.best, env) >= base_ei
        )
        t_above = sum(
            1 for c in cells
            if c.best_model == "T" and environmental_impact(c.best, env) > base_ei
        )
        t_total = sum(1 for c in cells if c.best_model == "T")
        print(f"{name}: baseline EI {base_ei:.1f}, O cells at/above: {o_above}, "
              f"T cells above: {t_above}/{t_total}", flush=True)

    zone = [c for c in cells if 0.4 <= c.alpha <= 0.9 and c.beta_mag <= 0.3]
    rows = stochastic_vs_constant(params, zone, costs, contract,
                                  CONSUMPTION_DOMINANT, args.price_step)
    inner = [r for r in rows if not r.near_boundary]
    print(f"stochastic-vs-constant: {len(rows)} zone cells, "
          f"{len(inner)} off-boundary", flush=True)
    print(f"profit delta: inner min {min(r.profit_delta for r in inner):+.4f}, "
          f"max {max(r.profit_delta for r in rows):+.4f}", flush=True)
    o_inner = [r for r in inner if r.best_model == "O"]
    if o_inner:
        print(f"impact delta over O cells: max {max(r.impact_delta for r in o_inner):+.4f}",
              flush=True)
    with open(out / "stochastic_compare.pkl", "wb") as fh:
        pickle.dump(rows, fh)
    header = ["alpha", "beta_mag", "best_model", "profit_stoch", "profit_const",
              "profit_delta", "impact_stoch", "impact_const", "impact_delta",
              "near_boundary"]
    csv_rows = [
        [f"{r.alpha:.10g}", f"{r.beta_mag:.10g}", r.best_model,
         f"{r.profit_stoch:.6f}", f"{r.profit_const:.6f}", f"{r.profit_delta:.10g}",
         f"{r.impact_stoch:.10g}", f"{r.impact_const:.10g}", f"{r.impact_delta:.10g}",
         "true" if r.near_boundary else "false"]
        for r in rows
    ]
    write_csv(out / "stochastic_compare.csv", header, csv_rows, cfg)

    (out / "map_meta.toml").write_text(
        f"elapsed_s = {elapsed:.1f}\n"
        f"perception_step = {args.perception_step}\n"
        f"price_step = {args.price_step}\n"
        f"cells = {len(cells)}\n"
    )


if __name__ == "__main__":
    main()
