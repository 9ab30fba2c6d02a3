"""Closed-form profit approximations, analytic thresholds, decision roadmap.

Dropping the one-step lag between the stocking fractile and the expected
sales turns every profit into a deterministic-relaxation quadratic whose
optimum has a closed form.  The approximations upper-bound the exact grid
optima, touch them at the fractile step points, and drive both the analytic
new-vs-in-house boundary and the hierarchical model-selection roadmap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._kernels import CoexistenceGeometry
from .market import CostStructure, MarketParams, Perception

__all__ = [
    "ApproxOutcome",
    "Thresholds",
    "approx_model_n",
    "approx_model_o",
    "thresholds",
    "roadmap_select",
]

NEW_ONLY = "new-only"
REMAN_ONLY = "remanufactured-only"
COEXISTENCE = "coexistence"


@dataclass(frozen=True)
class ApproxOutcome:
    """Closed-form branch, prices, and relaxation profit."""

    branch: str
    profit: float
    p_n: float | None = None
    p_r: float | None = None


def approx_model_n(params: MarketParams, costs: CostStructure) -> ApproxOutcome:
    """New-only relaxation: price (c + v_n)/2, profit lam (v_n - c)^2 / (4 v_n)."""
    v_n = params.new_value
    if costs.c >= v_n:
        return ApproxOutcome(branch=NEW_ONLY, profit=0.0)
    p = (costs.c + v_n) / 2.0
    profit = params.lam * (v_n - costs.c) ** 2 / (4.0 * v_n)
    return ApproxOutcome(branch=NEW_ONLY, profit=profit, p_n=p)


def approx_model_o(
    params: MarketParams, perc: Perception, costs: CostStructure
) -> ApproxOutcome:
    """Branch and closed-form optimum of the in-house relaxation.

    The coexistence critical point is interior exactly when

        ((1+beta)(1-alpha)/alpha) k  <  c - k  <  (1+beta)(1-alpha) v_n

    with k the unit remanufacturing-plus-collection cost.  A violated lower
    bound collapses to the plain new-only problem, a violated upper bound to
    the remanufactured-only one.  (When both are violated the remanufactured
    value is at or below k, so new-only is the binding collapse.)
    """
    if perc.beta > 0:
        raise ValueError("in-house approximation requires beta <= 0")
    v_n = params.new_value
    k = costs.reman_unit_cost
    a = (1.0 + perc.beta) * (1.0 - perc.alpha) * v_n
    b = perc.alpha * v_n
    margin = costs.c - k

    lower = math.inf if perc.alpha == 0 else ((1.0 + perc.beta) * (1.0 - perc.alpha) / perc.alpha) * k
    if margin <= lower:
        plain = approx_model_n(params, costs)
        return ApproxOutcome(branch=NEW_ONLY, profit=plain.profit, p_n=plain.p_n)
    if margin >= a:
        if b <= k:
            return ApproxOutcome(branch=REMAN_ONLY, profit=0.0)
        return ApproxOutcome(
            branch=REMAN_ONLY,
            profit=params.lam * (b - k) ** 2 / (4.0 * b),
            p_r=(k + b) / 2.0,
        )
    geom = CoexistenceGeometry(params.lam, v_n, perc.alpha, perc.beta, costs.c, k)
    return ApproxOutcome(
        branch=COEXISTENCE,
        profit=geom.relax_peak(),
        p_n=(costs.c + geom.g) / 2.0,
        p_r=geom.pr_star,
    )


class Thresholds:
    """Analytic perception thresholds for the new-vs-in-house comparison.

    ``alpha1``: below it no assimilation level makes in-house remanufacturing
    beat new-only.  ``alpha2``: above it in-house wins for every assimilation
    level.  ``beta1(alpha)`` is the boundary assimilation magnitude between
    the two; outside its validity domain it returns None and callers fall
    back to comparing the closed-form profits directly.
    """

    def __init__(self, params: MarketParams, costs: CostStructure):
        v_n = params.new_value
        k = costs.reman_unit_cost
        if not k < costs.c < v_n:
            raise ValueError(
                f"thresholds require c_r + c_coll < c < v_n, got {k}, {costs.c}, {v_n}"
            )
        self._params = params
        self._costs = costs
        self._v_n = v_n
        self._c = costs.c
        self._k = k
        spread = v_n - costs.c
        root = math.sqrt(spread**2 + 4.0 * v_n * k)
        self.alpha1 = k / costs.c
        self.alpha2 = (spread**2 + spread * root + 2.0 * v_n * k) / (2.0 * v_n**2)

    def in_house_beats_new(self, alpha: float, beta_mag: float) -> bool:
        """Direct closed-form profit comparison (used where beta1 is undefined)."""
        o = approx_model_o(self._params, Perception(alpha, -abs(beta_mag)), self._costs)
        n = approx_model_n(self._params, self._costs)
        return o.profit >= n.profit

    def beta1(self, alpha: float) -> float | None:
        """Assimilation boundary |beta| at which both relaxations tie."""
        if not 0.0 < alpha < 1.0:
            return None
        v_n, c, k = self._v_n, self._c, self._k
        f1 = (alpha * v_n + k) ** 2 - alpha * (v_n + c) ** 2
        f2 = (alpha * v_n - k) ** 2 - alpha * (v_n - c) ** 2
        prod = f1 * f2
        if prod < 0.0:
            if prod < -1e-9 * (f1 * f1 + f2 * f2 + 1.0):
                return None
            prod = 0.0
        num = alpha * c**2 - k**2 - alpha * (1.0 - alpha) * v_n**2 + math.sqrt(prod)
        val = abs(num / (2.0 * alpha * (1.0 - alpha) * v_n**2))
        return val if val <= 1.0 + 1e-9 else None


def thresholds(params: MarketParams, costs: CostStructure) -> Thresholds:
    return Thresholds(params, costs)


def roadmap_select(
    perc: Perception,
    thr: Thresholds,
    t_boundary: dict[float, float] | None = None,
) -> str:
    """Hierarchical model choice from perception coordinates.

    First tier: the remanufactured-value discount alone settles the extremes
    (low -> no remanufacturing, high -> in-house).  Second tier: the
    perception-effect magnitude decides between licensing (at or above the
    numeric licensing boundary for that alpha, when one exists) and the
    analytic new-vs-in-house split.

    ``t_boundary`` maps alpha values to the smallest |beta| at which
    licensing is the most profitable model -- a numeric artifact of the
    selection map; there is no closed form for it.
    """
    alpha = perc.alpha
    mag = abs(perc.beta)
    cut = _boundary_lookup(t_boundary, alpha)
    if alpha >= thr.alpha2:
        return "O"
    if cut is not None and mag >= cut:
        return "T"
    if alpha < thr.alpha1:
        return "N"
    b1 = thr.beta1(alpha)
    if b1 is not None:
        return "O" if mag <= b1 else "N"
    return "O" if thr.in_house_beats_new(alpha, mag) else "N"


def _boundary_lookup(t_boundary, alpha):
    if not t_boundary:
        return None
    key = min(t_boundary, key=lambda a: abs(a - alpha))
    if abs(key - alpha) > 0.025:  # no boundary information this close
        return None
    val = t_boundary[key]
    return None if val is None or (isinstance(val, float) and math.isnan(val)) else val
