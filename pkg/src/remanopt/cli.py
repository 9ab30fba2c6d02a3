"""Command-line interface: config ingestion, analysis dispatch, CSV output.

Every subcommand reads one optional TOML config (defaults mirror the
reference parameterization), applies flag overrides, runs the analysis, and
writes CSV files whose first lines echo the effective config as commented
TOML followed by the library version.  Emissions are atomic
(write-then-rename) and byte-deterministic for a given config.

Exit codes: 0 success, 1 config error, 2 infeasible problem, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .analysis import (
    CONSUMPTION_DOMINANT,
    PRODUCTION_DOMINANT,
    contract_sweep,
    coordination_case,
    environmental_impact,
    market_dynamics,
    perception_grid,
    selection_map,
    stochastic_vs_constant,
)
from .closedform import thresholds
from .market import Contract, CostStructure, MarketParams, Perception
from .models import (
    Decision,
    Outcome,
    optimize_model_n,
    optimize_model_o,
    optimize_model_t,
)
from .simulate import simulate_market, validate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3

SCENARIOS = {
    "production-dominant": PRODUCTION_DOMINANT,
    "consumption-dominant": CONSUMPTION_DOMINANT,
}


class ConfigError(Exception):
    pass


class InfeasibleError(Exception):
    pass


@dataclass
class RunConfig:
    """Every knob a run can turn, defaulting to the reference values."""

    lam: float = 1000.0
    V: float = 1000.0
    delta: float = 0.8
    c: float = 200.0
    c_r: float = 80.0
    c_coll: float = 40.0
    H: float = 10000.0
    h: float = 100.0
    alpha: float = 0.6
    beta: float = 0.3
    price_step: float = 0.1
    new_price_step: float = 0.01
    perception_step: float = 0.01
    zone_alpha: tuple[float, float] = (0.4, 0.9)
    zone_beta: tuple[float, float] = (0.0, 0.3)
    seed: int = 2024
    replications: int = 1_000_000
    fractile: str = "min-k"
    constant_rounding: str = "floor"
    workers: int = 0  # 0 = one per cpu
    out_dir: str = "out"

    # section -> (field, caster)
    _LAYOUT = {
        "market": {"lam": float, "V": float, "delta": float},
        "costs": {"c": float, "c_r": float, "c_coll": float},
        "contract": {"H": float, "h": float},
        "perception": {"alpha": float, "beta": float},
        "grids": {
            "price_step": float,
            "new_price_step": float,
            "perception_step": float,
            "zone_alpha": tuple,
            "zone_beta": tuple,
        },
        "simulation": {"seed": int, "replications": int},
        "options": {
            "fractile": str,
            "constant_rounding": str,
            "workers": int,
            "out_dir": str,
        },
    }

    @classmethod
    def from_toml(cls, text: str) -> "RunConfig":
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config is not valid TOML: {exc}") from exc
        cfg = cls()
        for section, fields in cls._LAYOUT.items():
            block = raw.get(section, {})
            if not isinstance(block, dict):
                raise ConfigError(f"[{section}] must be a table")
            for key, value in block.items():
                if key not in fields:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                caster = fields[key]
                try:
                    setattr(cfg, key, tuple(value) if caster is tuple else caster(value))
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"bad value for {section}.{key}: {value!r}") from exc
        cfg.validate()
        return cfg

    def to_toml(self) -> str:
        lines = []
        for section, fields in self._LAYOUT.items():
            lines.append(f"[{section}]")
            for key in fields:
                value = getattr(self, key)
                if isinstance(value, str):
                    lines.append(f'{key} = "{value}"')
                elif isinstance(value, tuple):
                    lines.append(f"{key} = [{', '.join(repr(float(v)) for v in value)}]")
                else:
                    lines.append(f"{key} = {value!r}")
            lines.append("")
        return "\n".join(lines)

    def validate(self):
        if self.fractile not in ("min-k", "floor"):
            raise ConfigError(f"fractile must be 'min-k' or 'floor', got {self.fractile!r}")
        if self.constant_rounding not in ("floor", "ceil"):
            raise ConfigError("constant_rounding must be 'floor' or 'ceil'")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if min(self.price_step, self.new_price_step, self.perception_step) <= 0:
            raise ConfigError("grid steps must be > 0")
        try:
            self.market_params()
            self.cost_structure()
            self.contract()
            Perception(self.alpha, self.beta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.h < self.c:
            raise ConfigError(f"unit fee must satisfy h < c, got h={self.h}, c={self.c}")

    def market_params(self) -> MarketParams:
        return MarketParams(lam=self.lam, V=self.V, delta=self.delta)

    def cost_structure(self) -> CostStructure:
        return CostStructure(c=self.c, c_r=self.c_r, c_coll=self.c_coll)

    def contract(self) -> Contract:
        return Contract(H=self.H, h=self.h)

    def stock_rule(self) -> str:
        return self.fractile

    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# CSV plumbing
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _fmt_money(value) -> str:
    return "" if value is None else format(value, ".6f")


def write_csv(path: Path, header: list[str], rows: list[list], config: RunConfig,
              quiet: bool = False):
    """Atomic CSV emission with a commented config echo block."""
    preamble = [f"# remanopt {__version__}"]
    preamble += [f"# {line}" for line in config.to_toml().splitlines()]
    body = [",".join(header)]
    body += [",".join(_fmt(v) if not isinstance(v, str) else v for v in row) for row in rows]
    text = "\n".join(preamble + body) + "\n"
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    if not quiet:
        print(f"wrote {path} ({len(rows)} rows)")


def read_config_echo(path: Path) -> RunConfig:
    """Re-parse the commented config block of an emitted CSV."""
    lines = []
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            lines.append(line[1:].strip("\n").removeprefix(" "))
    return RunConfig.from_toml("\n".join(lines[1:]))  # first line is the version


def _read_csv_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                continue
            parts = line.rstrip("\n").split(",")
            if header is None:
                header = parts
            else:
                rows.append(parts)
    if header is None:
        raise ConfigError(f"{path} contains no CSV header")
    return header, rows


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

def _outcome_row(model: str, alpha, beta, out: Outcome) -> list:
    d = out.decision
    return [
        model,
        _fmt(alpha),
        _fmt(beta),
        _fmt_money(d.p_n),
        _fmt(d.q_n),
        _fmt_money(d.p_r),
        _fmt(d.q_r),
        out.region.value,
        _fmt_money(out.oem_profit),
        _fmt_money(out.oem_expected_profit),
        _fmt_money(out.tpr_profit),
        _fmt_money(out.tpr_expected_profit),
        _fmt(out.authorization_declined),
    ]


_OUTCOME_HEADER = [
    "model", "alpha", "beta", "p_n", "q_n", "p_r", "q_r", "region",
    "oem_profit", "oem_expected_profit", "tpr_profit", "tpr_expected_profit",
    "authorization_declined",
]

MAP_HEADER = [
    "alpha", "beta_mag", "best_model",
    "profit_n", "profit_o", "profit_t",
    "pn_n", "qn_n",
    "pn_o", "qn_o", "pr_o", "qr_o", "region_o",
    "pn_t", "qn_t", "pr_t", "qr_t", "declined_t",
    "sales_n_best", "sales_r_best",
]


def _map_rows(cells) -> list[list]:
    rows = []
    for cell in cells:
        n, o, t = cell.outcomes["N"], cell.outcomes["O"], cell.outcomes["T"]
        best = cell.best
        rows.append([
            _fmt(cell.alpha), _fmt(cell.beta_mag), cell.best_model,
            _fmt_money(n.oem_profit), _fmt_money(o.oem_profit), _fmt_money(t.oem_profit),
            _fmt_money(n.decision.p_n), _fmt(n.decision.q_n),
            _fmt_money(o.decision.p_n), _fmt(o.decision.q_n),
            _fmt_money(o.decision.p_r), _fmt(o.decision.q_r), o.region.value,
            _fmt_money(t.decision.p_n), _fmt(t.decision.q_n),
            _fmt_money(t.decision.p_r), _fmt(t.decision.q_r), _fmt(t.authorization_declined),
            _fmt(best.expected_sales[0]), _fmt(best.expected_sales[1]),
        ])
    return rows


def _compute_map(cfg: RunConfig, quiet: bool):
    grid = perception_grid(cfg.perception_step)
    if not quiet:
        print(f"computing selection map on {len(grid)}x{len(grid)} perception cells")
    return selection_map(
        cfg.market_params(), cfg.cost_structure(), cfg.contract(),
        grid, grid, price_step=cfg.price_step, n_price_step=cfg.new_price_step,
        workers=cfg.effective_workers(),
    )


def _cells_from_map_csv(path: Path, cfg: RunConfig):
    """Rebuild lightweight cells (labels, decisions, profits) from a map CSV."""
    header, raw = _read_csv_rows(path)
    idx = {name: i for i, name in enumerate(header)}
    missing = [k for k in MAP_HEADER if k not in idx]
    if missing:
        raise ConfigError(f"{path} lacks selection-map columns: {missing}")
    cells = []
    for row in raw:
        cells.append({
            "alpha": float(row[idx["alpha"]]),
            "beta_mag": float(row[idx["beta_mag"]]),
            "best_model": row[idx["best_model"]],
            "profits": {
                "N": float(row[idx["profit_n"]]),
                "O": float(row[idx["profit_o"]]),
                "T": float(row[idx["profit_t"]]),
            },
            "decisions": {
                "N": _mk_decision(row, idx, "pn_n", "qn_n", None, None),
                "O": _mk_decision(row, idx, "pn_o", "qn_o", "pr_o", "qr_o"),
                "T": _mk_decision(row, idx, "pn_t", "qn_t", "pr_t", "qr_t"),
            },
            "declined_t": row[idx["declined_t"]] == "true",
        })
    return cells


def _mk_decision(row, idx, pn, qn, pr, qr) -> Decision:
    def get(col):
        if col is None:
            return None
        val = row[idx[col]]
        return None if val == "" else float(val)

    p_n, q_n = get(pn), get(qn)
    p_r, q_r = get(pr), get(qr)
    return Decision(
        p_n=p_n, q_n=None if q_n is None else int(q_n),
        p_r=p_r, q_r=None if q_r is None else int(q_r),
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_optimize(cfg: RunConfig, args) -> list[tuple[str, list[str], list[list]]]:
    model = args.model.upper()
    params, costs = cfg.market_params(), cfg.cost_structure()
    rule = cfg.stock_rule()
    if model == "N":
        if costs.c >= params.new_value:
            raise InfeasibleError("production cost at or above the product value")
        out = optimize_model_n(params, costs, cfg.new_price_step, stock_rule=rule)
        alpha = beta = ""
    elif model == "O":
        perc = Perception(cfg.alpha, -abs(cfg.beta))
        out = optimize_model_o(params, perc, costs, cfg.price_step, stock_rule=rule)
        alpha, beta = cfg.alpha, perc.beta
    elif model == "T":
        perc = Perception(cfg.alpha, abs(cfg.beta))
        out = optimize_model_t(
            params, perc, costs, cfg.contract(), cfg.price_step, stock_rule=rule
        )
        alpha, beta = cfg.alpha, perc.beta
    elif model == "COORDINATION":
        perc = Perception(cfg.alpha, abs(cfg.beta))
        out = coordination_case(params, perc, costs, cfg.price_step)
        alpha, beta = cfg.alpha, perc.beta
    else:
        raise ConfigError(f"unknown model {args.model!r}")
    if out.decision == Decision() and out.oem_profit == 0.0:
        raise InfeasibleError("no profitable decision exists under this configuration")
    name = f"optimize_{model.lower()}.csv"
    return [(name, _OUTCOME_HEADER, [_outcome_row(model, alpha, beta, out)])]


def cmd_thresholds(cfg: RunConfig, args) -> list[tuple[str, list[str], list[list]]]:
    params, costs = cfg.market_params(), cfg.cost_structure()
    try:
        thr = thresholds(params, costs)
    except ValueError as exc:
        raise InfeasibleError(str(exc)) from exc
    rows = [
        ["alpha1", "", _fmt(thr.alpha1)],
        ["alpha2", "", _fmt(thr.alpha2)],
        ["beta1_at_alpha2", _fmt(thr.alpha2), _fmt(thr.beta1(thr.alpha2))],
    ]
    for alpha in perception_grid(0.01):
        b1 = thr.beta1(float(alpha))
        if b1 is not None:
            rows.append(["beta1", _fmt(float(alpha)), _fmt(b1)])
    if args.map is not None:
        cells = _cells_from_map_csv(Path(args.map), cfg)
        t_alphas = [c["alpha"] for c in cells if c["best_model"] == "T"]
        if t_alphas:
            rows.append(
                ["t_region_lower_edge_numeric", _fmt(min(t_alphas)),
                 "observed, not analytic"]
            )
    return [("thresholds.csv", ["quantity", "alpha", "value"], rows)]


def cmd_map(cfg: RunConfig, args) -> list[tuple[str, list[str], list[list]]]:
    cells = _compute_map(cfg, args.quiet)
    return [("selection_map.csv", MAP_HEADER, _map_rows(cells))]


def _load_or_compute_cells(cfg, args):
    if getattr(args, "map", None):
        return _cells_from_map_csv(Path(args.map), cfg), True
    return _compute_map(cfg, args.quiet), False


def cmd_dynamics(cfg: RunConfig, args):
    cells, light = _load_or_compute_cells(cfg, args)
    baseline = optimize_model_n(
        cfg.market_params(), cfg.cost_structure(), cfg.new_price_step,
        stock_rule=cfg.stock_rule(),
    )
    base_q = baseline.decision.q_n or 0
    header = ["alpha", "beta_mag", "best_model", "total_q", "q_n",
              "reman_share", "total_delta", "qn_delta"]
    rows = []
    for cell in cells:
        if light:
            d = cell["decisions"][cell["best_model"]]
            q_n, q_r = d.q_n or 0, d.q_r or 0
            alpha, mag, model = cell["alpha"], cell["beta_mag"], cell["best_model"]
        else:
            row = market_dynamics(cell, baseline)
            rows.append([_fmt(row.alpha), _fmt(row.beta_mag), row.best_model,
                         _fmt(row.total_q), _fmt(row.q_n), _fmt(row.reman_share),
                         _fmt(row.total_delta), _fmt(row.qn_delta)])
            continue
        total = q_n + q_r
        rows.append([
            _fmt(alpha), _fmt(mag), model, _fmt(total), _fmt(q_n),
            _fmt(q_r / total if total else 0.0),
            _fmt((total - base_q) / base_q if base_q else 0.0),
            _fmt((q_n - base_q) / base_q if base_q else 0.0),
        ])
    return [("market_dynamics.csv", header, rows)]


def cmd_impact(cfg: RunConfig, args):
    env = SCENARIOS.get(args.scenario)
    if env is None:
        raise ConfigError(
            f"unknown scenario {args.scenario!r}; pick from {sorted(SCENARIOS)}"
        )
    cells, light = _load_or_compute_cells(cfg, args)
    params, costs = cfg.market_params(), cfg.cost_structure()
    baseline = optimize_model_n(params, costs, cfg.new_price_step,
                                stock_rule=cfg.stock_rule())
    base_ei = environmental_impact(baseline, env)
    header = ["alpha", "beta_mag", "best_model", "impact", "baseline_impact",
              "impact_delta"]
    rows = []
    for cell in cells:
        if light:
            model = cell["best_model"]
            perc = Perception(
                cell["alpha"], -cell["beta_mag"] if model == "O" else cell["beta_mag"]
            )
            from .analysis import _decision_impact

            ei = _decision_impact(cell["decisions"][model], params, perc, env)
            alpha, mag = cell["alpha"], cell["beta_mag"]
        else:
            ei = environmental_impact(cell.best, env)
            alpha, mag, model = cell.alpha, cell.beta_mag, cell.best_model
        rows.append([
            _fmt(alpha), _fmt(mag), model, _fmt(ei), _fmt(base_ei),
            _fmt((ei - base_ei) / base_ei if base_ei else 0.0),
        ])
    name = f"environmental_impact_{args.scenario.replace('-', '_')}.csv"
    return [(name, header, rows)]


def cmd_contract_sweep(cfg: RunConfig, args):
    perc = Perception(cfg.alpha, abs(cfg.beta))
    h_grid = [round(h, 10) for h in _h_grid(cfg.c, args.h_points)]
    rows_out = contract_sweep(
        cfg.market_params(), perc, cfg.cost_structure(),
        H_values=[0.0, cfg.H, 2 * cfg.H],
        h_values=h_grid,
        env=SCENARIOS[args.scenario],
        price_step=cfg.price_step,
    )
    header = ["kind", "H", "h", "declined", "p_n", "q_n", "p_r", "q_r",
              "oem_profit", "tpr_profit", "system_profit", "impact"]
    rows = []
    for r in rows_out:
        d = r.decision
        rows.append([
            r.kind, _fmt(r.H), _fmt(r.h), _fmt(r.declined),
            _fmt_money(d.p_n), _fmt(d.q_n), _fmt_money(d.p_r), _fmt(d.q_r),
            _fmt_money(r.oem_profit), _fmt_money(r.tpr_profit),
            _fmt_money(r.system_profit), _fmt(r.impact),
        ])
    return [("contract_sweep.csv", header, rows)]


def _h_grid(c: float, points: int) -> list[float]:
    # open interval (0, c): the unit fee may approach but not reach either end
    step = c / points
    return [i * step for i in range(1, points)]


def cmd_stochastic_compare(cfg: RunConfig, args):
    cells, light = _load_or_compute_cells(cfg, args)
    if light:
        raise ConfigError(
            "stochastic-compare needs full outcomes; run without --map"
        )
    (a_lo, a_hi), (b_lo, b_hi) = cfg.zone_alpha, cfg.zone_beta
    zone = [c for c in cells if a_lo <= c.alpha <= a_hi and b_lo <= c.beta_mag <= b_hi]
    if not zone:
        raise InfeasibleError("no map cells inside the comparison zone")
    rows_out = stochastic_vs_constant(
        cfg.market_params(), zone, cfg.cost_structure(), cfg.contract(),
        SCENARIOS[args.scenario], cfg.price_step, cfg.constant_rounding,
    )
    header = ["alpha", "beta_mag", "best_model", "profit_stoch", "profit_const",
              "profit_delta", "impact_stoch", "impact_const", "impact_delta",
              "near_boundary"]
    rows = [
        [_fmt(r.alpha), _fmt(r.beta_mag), r.best_model,
         _fmt_money(r.profit_stoch), _fmt_money(r.profit_const),
         _fmt(r.profit_delta), _fmt(r.impact_stoch), _fmt(r.impact_const),
         _fmt(r.impact_delta), _fmt(r.near_boundary)]
        for r in rows_out
    ]
    return [("stochastic_compare.csv", header, rows)]


def cmd_validate(cfg: RunConfig, args):
    params, costs, contract = cfg.market_params(), cfg.cost_structure(), cfg.contract()
    rule = cfg.stock_rule()
    runs = []
    n_out = optimize_model_n(params, costs, cfg.new_price_step, stock_rule=rule)
    runs.append(("N", "oem", None, None, n_out))
    perc_o = Perception(cfg.alpha, -abs(cfg.beta))
    runs.append(("O", "oem", perc_o, None,
                 optimize_model_o(params, perc_o, costs, cfg.price_step, stock_rule=rule)))
    perc_t = Perception(cfg.alpha, abs(cfg.beta))
    t_out = optimize_model_t(params, perc_t, costs, contract, cfg.price_step,
                             stock_rule=rule)
    runs.append(("T", "oem", perc_t, contract, t_out))
    if not t_out.authorization_declined:
        runs.append(("T", "tpr", perc_t, contract, t_out))

    header = ["model", "side", "analytic_expected_profit", "simulated_mean",
              "std_error", "k_sigma", "margin_sigmas", "passed"]
    rows = []
    for model, side, perc, con, out in runs:
        analytic = (
            out.tpr_expected_profit if side == "tpr" else out.oem_expected_profit
        )
        rep = simulate_market(
            out.decision, params, perc, costs, con, model,
            cfg.replications, cfg.seed, side=side,
        )
        res = validate(analytic, rep, k_sigma=args.k_sigma)
        rows.append([
            model, side, _fmt_money(analytic), _fmt_money(res.simulated),
            _fmt(res.std_error), _fmt(args.k_sigma), _fmt(res.margin_sigmas),
            _fmt(res.passed),
        ])
    return [("validation.csv", header, rows)]


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="remanopt",
        description="Remanufacturing business-model pricing under Poisson market size",
    )
    ap.add_argument("--config", type=Path, help="TOML config file")
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--price-step", type=float, help="two-product price lattice step")
    ap.add_argument("--perception-step", type=float, help="alpha/|beta| grid step")
    ap.add_argument("--seed", type=int, help="simulation seed")
    ap.add_argument("--replications", type=int, help="simulation replications")
    ap.add_argument("--fractile", choices=["min-k", "floor"], help="stocking rule")
    ap.add_argument("--workers", type=int, help="parallel workers (0 = auto)")
    ap.add_argument("--quiet", action="store_true", help="suppress progress output")

    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("optimize", help="single-point optimum for one model")
    p.add_argument("model", choices=["n", "o", "t", "coordination"])
    sub.add_parser("map", help="selection map over the perception grid")
    p = sub.add_parser("dynamics", help="market-dynamics metrics per map cell")
    p.add_argument("--map", help="reuse an emitted selection_map.csv")
    p = sub.add_parser("impact", help="environmental impact per map cell")
    p.add_argument("scenario", choices=sorted(SCENARIOS))
    p.add_argument("--map", help="reuse an emitted selection_map.csv")
    p = sub.add_parser("contract-sweep", help="fee sweep with coordination benchmark")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), default="production-dominant")
    p.add_argument("--h-points", type=int, default=40,
                   help="number of unit-fee grid intervals across (0, c)")
    p = sub.add_parser("stochastic-compare",
                       help="constant- vs stochastic-market decisions")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), default="consumption-dominant")
    p = sub.add_parser("validate", help="Monte Carlo check of analytic expectations")
    p.add_argument("--k-sigma", type=float, default=3.0)
    p = sub.add_parser("thresholds", help="analytic perception thresholds")
    p.add_argument("--map", help="selection_map.csv for the numeric licensing edge")
    return ap


COMMANDS = {
    "optimize": cmd_optimize,
    "map": cmd_map,
    "dynamics": cmd_dynamics,
    "impact": cmd_impact,
    "contract-sweep": cmd_contract_sweep,
    "stochastic-compare": cmd_stochastic_compare,
    "validate": cmd_validate,
    "thresholds": cmd_thresholds,
}


def load_config(args) -> RunConfig:
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        cfg = RunConfig.from_toml(text)
    else:
        cfg = RunConfig()
    overrides = {
        "price_step": args.price_step,
        "perception_step": args.perception_step,
        "seed": args.seed,
        "replications": args.replications,
        "fractile": args.fractile,
        "workers": args.workers,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.out is not None:
        cfg.out_dir = str(args.out)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        outputs = COMMANDS[args.command](cfg, args)
        for name, header, rows in outputs:
            write_csv(Path(cfg.out_dir) / name, header, rows, cfg, args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
