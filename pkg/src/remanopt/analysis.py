"""Cross-model studies over the consumer-perception plane.

Everything the single-point optimizers produce is aggregated here: the
model-selection map over (alpha, |beta|) grids, market-dynamics and
environmental-impact summaries per cell, the authorization-contract sweep
with its centralized benchmark, and the comparison of decisions optimized
under a constant market size against the stochastic optimum.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import (
    DET_CEIL,
    DET_FLOOR,
    DETERMINISTIC,
    TABLE,
    scan_single_product,
)
from .market import Contract, CostStructure, MarketParams, Perception
from .models import (
    COORDINATION,
    MODEL_N,
    MODEL_O,
    MODEL_T,
    Decision,
    Outcome,
    _optimize_two_product,
    evaluate_decision,
    evaluate_tpr,
    optimize_model_n,
    optimize_model_o,
    optimize_model_t,
)

__all__ = [
    "EnvParams",
    "SelectionCell",
    "PRODUCTION_DOMINANT",
    "CONSUMPTION_DOMINANT",
    "REALISTIC_ZONE",
    "perception_grid",
    "selection_map",
    "licensing_boundary",
    "market_dynamics",
    "environmental_impact",
    "contract_sweep",
    "coordination_case",
    "optimize_constant_market",
    "stochastic_vs_constant",
]

# perception rectangle with empirical support: alpha 0.4-0.9, |beta| 0-0.3
REALISTIC_ZONE = ((0.4, 0.9), (0.0, 0.3))


@dataclass(frozen=True)
class EnvParams:
    """Composite per-unit life-cycle impacts.

    gamma_n: production plus disposal of a new unit
    gamma_r: remanufacturing plus disposal of a remanufactured unit
    e_c:     consumption impact per unit actually sold
    """

    gamma_n: float
    gamma_r: float
    e_c: float

    def __post_init__(self):
        if min(self.gamma_n, self.gamma_r, self.e_c) < 0:
            raise ValueError("impacts must be >= 0")
        if not self.gamma_r < self.gamma_n:
            raise ValueError("remanufacturing must beat new production: gamma_r < gamma_n")


PRODUCTION_DOMINANT = EnvParams(gamma_n=7.0, gamma_r=3.0, e_c=1.0)
CONSUMPTION_DOMINANT = EnvParams(gamma_n=4.0, gamma_r=2.0, e_c=7.0)


@dataclass(frozen=True)
class SelectionCell:
    """One perception-grid cell: all three optima and the winner."""

    alpha: float
    beta_mag: float
    best_model: str
    outcomes: dict[str, Outcome]

    @property
    def best(self) -> Outcome:
        return self.outcomes[self.best_model]

    @property
    def profits(self) -> dict[str, float]:
        return {m: o.oem_profit for m, o in self.outcomes.items()}


def perception_grid(step: float, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    n = int(round((hi - lo) / step))
    return np.round(lo + np.arange(n + 1) * step, 10)


def _evaluate_cell(args):
    (alpha, mag, params, costs, contract, price_step, objective, n_outcome) = args
    o_out = optimize_model_o(
        params, Perception(alpha, -mag), costs, price_step, objective=objective
    )
    t_out = optimize_model_t(
        params, Perception(alpha, mag), costs, contract, price_step, objective=objective
    )
    outcomes = {MODEL_N: n_outcome, MODEL_O: o_out, MODEL_T: t_out}
    best = MODEL_N
    for model in (MODEL_O, MODEL_T):  # ties resolve N > O > T
        if outcomes[model].oem_profit > outcomes[best].oem_profit:
            best = model
    return SelectionCell(alpha=alpha, beta_mag=mag, best_model=best, outcomes=outcomes)


def selection_map(
    params: MarketParams,
    costs: CostStructure,
    contract: Contract,
    alpha_grid=None,
    beta_grid=None,
    price_step: float = 0.1,
    n_price_step: float = 0.01,
    objective: str = TABLE,
    workers: int | None = None,
) -> list[SelectionCell]:
    """Best business model per perception cell, row-major in (alpha, |beta|).

    The new-only optimum is perception-independent and computed once at
    ``n_price_step``; the two-product searches run per cell at
    ``price_step`` (0.1 by default, the resolution that reproduces the
    published two-product table values).
    """
    if alpha_grid is None:
        alpha_grid = perception_grid(0.01)
    if beta_grid is None:
        beta_grid = perception_grid(0.01)
    n_outcome = optimize_model_n(params, costs, n_price_step, objective=objective)
    jobs = [
        (float(alpha), float(mag), params, costs, contract, price_step, objective, n_outcome)
        for alpha in alpha_grid
        for mag in beta_grid
    ]
    if workers is None:
        workers = min(os.cpu_count() or 1, 8)
    if workers <= 1 or len(jobs) < 32:
        return [_evaluate_cell(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(jobs) // (workers * 16))
        return list(pool.map(_evaluate_cell, jobs, chunksize=chunk))


def licensing_boundary(cells: list[SelectionCell]) -> dict[float, float | None]:
    """Per alpha, the smallest |beta| at which licensing wins (None if never)."""
    edges: dict[float, float | None] = {}
    for cell in cells:
        edges.setdefault(cell.alpha, None)
        if cell.best_model == MODEL_T:
            cur = edges[cell.alpha]
            if cur is None or cell.beta_mag < cur:
                edges[cell.alpha] = cell.beta_mag
    return edges


@dataclass(frozen=True)
class DynamicsRow:
    alpha: float
    beta_mag: float
    best_model: str
    total_q: int
    q_n: int
    reman_share: float
    total_delta: float
    qn_delta: float


def market_dynamics(cell: SelectionCell, baseline: Outcome) -> DynamicsRow:
    """Quantity metrics of the cell's best model against the new-only baseline."""
    d = cell.best.decision
    q_n = d.q_n or 0
    q_r = d.q_r or 0
    total = q_n + q_r
    base = baseline.decision.q_n or 0
    return DynamicsRow(
        alpha=cell.alpha,
        beta_mag=cell.beta_mag,
        best_model=cell.best_model,
        total_q=total,
        q_n=q_n,
        reman_share=q_r / total if total else 0.0,
        total_delta=(total - base) / base if base else 0.0,
        qn_delta=(q_n - base) / base if base else 0.0,
    )


def environmental_impact(outcome: Outcome, env: EnvParams) -> float:
    """Life-cycle impact of a decision: stocked units plus expected sales."""
    d = outcome.decision
    sales_n, sales_r = outcome.expected_sales
    return (
        env.gamma_n * (d.q_n or 0)
        + env.gamma_r * (d.q_r or 0)
        + env.e_c * (sales_n + sales_r)
    )


def coordination_case(
    params: MarketParams,
    perc: Perception,
    costs: CostStructure,
    price_step: float = 0.1,
    objective: str = TABLE,
) -> Outcome:
    """Centralized benchmark: joint profit, no transfer fees, contrast demand."""
    if perc.beta < 0:
        raise ValueError("the centralized benchmark uses the contrast-side perception")
    return _optimize_two_product(
        params, perc, costs, price_step, objective, None, COORDINATION
    )


@dataclass(frozen=True)
class ContractRow:
    H: float
    h: float
    kind: str  # "two-part", "one-part", or "coordination"
    declined: bool
    oem_profit: float
    tpr_profit: float
    system_profit: float
    impact: float
    decision: Decision


def contract_sweep(
    params: MarketParams,
    perc: Perception,
    costs: CostStructure,
    H_values,
    h_values,
    env: EnvParams,
    price_step: float = 0.1,
    objective: str = TABLE,
) -> list[ContractRow]:
    """Licensed-model equilibria over a fee grid, plus the centralized row."""
    rows = []
    for H in H_values:
        for h in h_values:
            out = optimize_model_t(
                params, perc, costs, Contract(H=H, h=h), price_step, objective=objective
            )
            tpr = out.tpr_profit if out.tpr_profit is not None else 0.0
            rows.append(
                ContractRow(
                    H=H,
                    h=h,
                    kind="one-part" if H == 0 else "two-part",
                    declined=out.authorization_declined,
                    oem_profit=out.oem_profit,
                    tpr_profit=tpr,
                    system_profit=out.oem_profit + tpr,
                    impact=environmental_impact(out, env),
                    decision=out.decision,
                )
            )
    coord = coordination_case(params, perc, costs, price_step, objective)
    rows.append(
        ContractRow(
            H=0.0,
            h=0.0,
            kind="coordination",
            declined=False,
            oem_profit=coord.oem_profit,
            tpr_profit=0.0,
            system_profit=coord.oem_profit,
            impact=environmental_impact(coord, env),
            decision=coord.decision,
        )
    )
    return rows


# ---------------------------------------------------------------------------
# constant market size
# ---------------------------------------------------------------------------

def optimize_constant_market(
    params: MarketParams,
    perc: Perception | None,
    costs: CostStructure,
    contract: Contract | None,
    model: str,
    price_step: float = 0.1,
    rounding: str = "floor",
) -> Decision:
    """Optimal decision when exactly lam customers arrive every period.

    Demands equal their rates; stock is the rate rounded down (the lower
    integer, matching the stochastic convention) or up under
    ``rounding="ceil"``.
    """
    rule = {"floor": DET_FLOOR, "ceil": DET_CEIL}[rounding]
    if model == MODEL_N:
        hit = scan_single_product(
            params.new_value, costs.c, params.lam, price_step, DETERMINISTIC,
            stock_rule=rule,
        )
        if hit is None:
            return Decision()
        return Decision(p_n=hit[0], q_n=hit[1])
    if model in (MODEL_O, COORDINATION):
        out = _optimize_two_product(
            params, perc, costs, price_step, DETERMINISTIC, rule, model
        )
        return out.decision
    if model == MODEL_T:
        out = optimize_model_t(
            params, perc, costs, contract, price_step,
            objective=DETERMINISTIC, stock_rule=rule,
        )
        return out.decision
    raise ValueError(f"unknown model {model!r}")


@dataclass(frozen=True)
class StochasticCompareRow:
    alpha: float
    beta_mag: float
    best_model: str
    profit_stoch: float
    profit_const: float
    profit_delta: float
    impact_stoch: float
    impact_const: float
    impact_delta: float
    near_boundary: bool


def _decision_impact(decision, params, perc, env):
    from . import poisson
    from .models import _decision_rates

    rate_n, rate_r = _decision_rates(decision, params, perc)
    sales_n = poisson.expected_min(rate_n, decision.q_n or 0)
    sales_r = poisson.expected_min(rate_r, decision.q_r or 0)
    return (
        env.gamma_n * (decision.q_n or 0)
        + env.gamma_r * (decision.q_r or 0)
        + env.e_c * (sales_n + sales_r)
    )


def _system_value(decision, model, params, perc, costs, contract, objective):
    """Total value of all parties' sides under the stochastic market."""
    oem = evaluate_decision(
        decision, model, params, perc, costs, contract, objective=objective
    )
    if model == MODEL_T and decision.p_r is not None:
        oem += evaluate_tpr(decision, params, perc, costs, contract, objective)
    return oem


def stochastic_vs_constant(
    params: MarketParams,
    cells: list[SelectionCell],
    costs: CostStructure,
    contract: Contract,
    env: EnvParams,
    price_step: float = 0.1,
    rounding: str = "floor",
    objective: str = TABLE,
) -> list[StochasticCompareRow]:
    """Apply constant-market decisions to the stochastic market, per cell.

    For each cell's best model, both the stochastic optimizer's decision and
    the constant-market decision are valued under the stochastic market
    (system-wide for the licensed model).  The default ``table`` convention
    plugs both decisions into the reduced-form profit -- the evaluation that
    reproduces the published stochasticity gains; ``expectation`` gives the
    plain expected-profit comparison instead.  Environmental impacts always
    use expected sales.  Cells whose best model differs from a neighbor's
    within one grid step are flagged ``near_boundary``; discreteness makes
    deltas there unstable.
    """
    by_coord = {(c.alpha, c.beta_mag): c.best_model for c in cells}
    alphas = sorted({c.alpha for c in cells})
    betas = sorted({c.beta_mag for c in cells})
    da = alphas[1] - alphas[0] if len(alphas) > 1 else 0.0
    db = betas[1] - betas[0] if len(betas) > 1 else 0.0

    const_cache: dict[tuple, Decision] = {}
    rows = []
    for cell in cells:
        model = cell.best_model
        perc = Perception(
            cell.alpha, -cell.beta_mag if model == MODEL_O else cell.beta_mag
        )
        key = (model, cell.alpha, cell.beta_mag if model != MODEL_N else 0.0)
        if model == MODEL_N:
            key = (MODEL_N,)
        if key not in const_cache:
            const_cache[key] = optimize_constant_market(
                params, perc, costs, contract, model, price_step, rounding
            )
        d_const = const_cache[key]
        d_stoch = cell.best.decision

        p_stoch = _system_value(d_stoch, model, params, perc, costs, contract, objective)
        p_const = _system_value(d_const, model, params, perc, costs, contract, objective)
        i_stoch = _decision_impact(d_stoch, params, perc, env)
        i_const = _decision_impact(d_const, params, perc, env)

        near = False
        for na, nb in (
            (cell.alpha - da, cell.beta_mag),
            (cell.alpha + da, cell.beta_mag),
            (cell.alpha, cell.beta_mag - db),
            (cell.alpha, cell.beta_mag + db),
        ):
            other = by_coord.get((round(na, 10), round(nb, 10)))
            if other is not None and other != model:
                near = True
        rows.append(
            StochasticCompareRow(
                alpha=cell.alpha,
                beta_mag=cell.beta_mag,
                best_model=model,
                profit_stoch=p_stoch,
                profit_const=p_const,
                profit_delta=(p_stoch - p_const) / p_const if p_const else 0.0,
                impact_stoch=i_stoch,
                impact_const=i_const,
                impact_delta=(i_stoch - i_const) / i_const if i_const else 0.0,
                near_boundary=near,
            )
        )
    return rows
