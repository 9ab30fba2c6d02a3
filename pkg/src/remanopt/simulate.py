"""Monte Carlo market oracle.

Samples the market directly from its primitives -- a Poisson number of
customers, each with a uniform preference draw -- applies the utility
comparison with ties going to the new product, censors sales at the stocked
quantities, and aggregates realized profits.  Nothing here reuses the
analytic demand-rate formulas, which is the point: agreement between these
estimates and the closed-form expectations validates both.

Randomness comes from counter-based Philox streams keyed by
``(seed, block_index)`` over fixed-size replication blocks, so results are
bit-identical for a given seed regardless of how work is scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .market import Contract, CostStructure, MarketParams, Perception, perceived_values
from .models import Decision

__all__ = ["SimReport", "simulate_market", "validate", "ValidationResult"]

_BLOCK = 4096


@dataclass(frozen=True)
class SimReport:
    mean_profit: float
    std_error: float
    mean_sales: tuple[float, float]
    replications: int
    seed: int


@dataclass(frozen=True)
class ValidationResult:
    passed: bool
    analytic: float
    simulated: float
    std_error: float
    margin_sigmas: float


def _choices(theta, decision, params, perc):
    """Boolean (buys_new, buys_reman) per customer for the offered lineup."""
    v_n, v_r, g = perceived_values(params, perc if perc is not None else Perception(0, 0))
    offers_new = decision.p_n is not None
    offers_reman = decision.p_r is not None
    if offers_new and offers_reman:
        u_n = theta * g - decision.p_n
        u_r = theta * v_r - decision.p_r
        buy_n = (u_n >= 0.0) & (u_n >= u_r)
        buy_r = (u_r >= 0.0) & (u_r > u_n)
        return buy_n, buy_r
    if offers_new:
        # lone product: no perception adjustment without a remanufactured rival
        return theta * v_n >= decision.p_n, np.zeros(theta.shape, dtype=bool)
    if offers_reman:
        return np.zeros(theta.shape, dtype=bool), theta * v_r >= decision.p_r
    z = np.zeros(theta.shape, dtype=bool)
    return z, z


def _profits(sales_n, sales_r, decision, costs, contract, model, side):
    q_n = decision.q_n or 0
    q_r = decision.q_r or 0
    p_n = decision.p_n or 0.0
    p_r = decision.p_r or 0.0
    if model == "N":
        return p_n * sales_n - costs.c * q_n
    if model in ("O", "C"):
        return (
            p_n * sales_n
            + p_r * sales_r
            - costs.c * q_n
            - costs.reman_unit_cost * q_r
        )
    if model == "T":
        if contract is None:
            raise ValueError("licensed-model simulation requires the contract")
        if side == "tpr":
            return p_r * sales_r - contract.H - (costs.c_r + contract.h) * q_r
        fees = contract.H + (contract.h - costs.c_coll) * q_r
        return p_n * sales_n - costs.c * q_n + fees
    raise ValueError(f"unknown model {model!r}")


def simulate_market(
    decision: Decision,
    params: MarketParams,
    perc: Perception | None,
    costs: CostStructure,
    contract: Contract | None,
    model: str,
    replications: int,
    seed: int,
    side: str = "oem",
) -> SimReport:
    """Estimate the expected profit and sales of a fixed decision.

    ``side`` selects whose realized profit is reported under the licensed
    model ("oem" or "tpr"); other models ignore it.
    """
    if replications < 1:
        raise ValueError(f"replications must be >= 1, got {replications}")
    q_n = decision.q_n or 0
    q_r = decision.q_r or 0

    total_profit = 0.0
    total_sq = 0.0
    total_sales = np.zeros(2)
    done = 0
    block = 0
    while done < replications:
        n_reps = min(_BLOCK, replications - done)
        rng = np.random.Generator(np.random.Philox(key=[seed, block]))
        counts = rng.poisson(params.lam, size=n_reps)
        theta = rng.random(counts.sum())
        rep_of = np.repeat(np.arange(n_reps), counts)
        buy_n, buy_r = _choices(theta, decision, params, perc)
        d_n = np.bincount(rep_of[buy_n], minlength=n_reps)
        d_r = np.bincount(rep_of[buy_r], minlength=n_reps)
        sales_n = np.minimum(d_n, q_n)
        sales_r = np.minimum(d_r, q_r)
        profit = _profits(sales_n, sales_r, decision, costs, contract, model, side)
        total_profit += float(profit.sum())
        total_sq += float((profit * profit).sum())
        total_sales += (float(sales_n.sum()), float(sales_r.sum()))
        done += n_reps
        block += 1

    mean = total_profit / replications
    if replications > 1:
        var = max(total_sq / replications - mean * mean, 0.0) * (
            replications / (replications - 1)
        )
    else:
        var = 0.0
    std_error = float(np.sqrt(var / replications))
    return SimReport(
        mean_profit=mean,
        std_error=std_error,
        mean_sales=(total_sales[0] / replications, total_sales[1] / replications),
        replications=replications,
        seed=seed,
    )


def validate(analytic: float, report: SimReport, k_sigma: float = 3.0) -> ValidationResult:
    """Pass iff the analytic value sits within k_sigma standard errors."""
    if k_sigma <= 0:
        raise ValueError(f"k_sigma must be > 0, got {k_sigma}")
    gap = abs(analytic - report.mean_profit)
    margin = gap / report.std_error if report.std_error > 0 else (0.0 if gap == 0 else np.inf)
    return ValidationResult(
        passed=bool(gap <= k_sigma * report.std_error),
        analytic=analytic,
        simulated=report.mean_profit,
        std_error=report.std_error,
        margin_sigmas=float(margin),
    )
