"""Consumer utility model, perceived values, demand rates, price regions.

A customer with preference ``theta ~ U[0,1]`` values a second-stage new
product at ``theta * g`` and a remanufactured one at ``theta * v_r``, where
``g`` adjusts the new-product value for the perception effect that kicks in
once both products share the market (``beta < 0``: same-seller assimilation,
``beta > 0``: third-party contrast).  Comparing the two utilities and the
outside option splits the preference line at three thresholds; the measure
of each segment times the expected market size gives the Poisson demand
rates for the two products.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "MarketParams",
    "Perception",
    "CostStructure",
    "Contract",
    "Region",
    "perceived_values",
    "demand_rates",
    "classify_region",
    "single_product_rate",
]


@dataclass(frozen=True)
class MarketParams:
    """Exogenous market environment.

    lam:   expected number of potential customers per sales period
    V:     base product value (first-stage currency value)
    delta: second-stage depreciation factor in [0, 1]
    """

    lam: float
    V: float
    delta: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if not self.V > 0:
            raise ValueError(f"V must be > 0, got {self.V}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")

    @property
    def new_value(self) -> float:
        """Second-stage value of a new product."""
        return self.delta * self.V


@dataclass(frozen=True)
class Perception:
    """Consumer-perception coordinates.

    alpha: willingness-to-pay discount for remanufactured products, in [0, 1]
    beta:  perception factor in [-1, 1]; negative values model the
           assimilation effect (in-house remanufacturing), positive values
           the contrast effect (third-party remanufacturing)
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not -1.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [-1, 1], got {self.beta}")


@dataclass(frozen=True)
class CostStructure:
    """Unit costs: new production c, remanufacturing c_r, collection c_coll.

    Remanufacturing a collected unit must cost less than producing new
    (c_r + c_coll < c), consistent with the cost savings that motivate
    remanufacturing in the first place.
    """

    c: float
    c_r: float
    c_coll: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be > 0, got {self.c}")
        if self.c_r < 0 or self.c_coll < 0:
            raise ValueError("c_r and c_coll must be >= 0")
        if not self.c_r + self.c_coll < self.c:
            raise ValueError(
                f"remanufacturing must save cost: c_r + c_coll = "
                f"{self.c_r + self.c_coll} must be < c = {self.c}"
            )

    @property
    def reman_unit_cost(self) -> float:
        return self.c_r + self.c_coll


@dataclass(frozen=True)
class Contract:
    """Two-part authorization tariff: one-time fee H plus per-unit fee h.

    ``h < c`` (checked where the cost structure is known) keeps the licensee
    from profiting by remanufacturing artificially created products.
    """

    H: float
    h: float

    def __post_init__(self):
        if self.H < 0:
            raise ValueError(f"H must be >= 0, got {self.H}")
        if not self.h > 0:
            raise ValueError(f"h must be > 0, got {self.h}")


class Region(enum.Enum):
    """Price-plane market outcome for a two-product offering."""

    INFEASIBLE = "I"
    NEW_ONLY = "II"
    REMAN_ONLY = "III"
    COEXISTENCE = "IV"


def perceived_values(params: MarketParams, perc: Perception) -> tuple[float, float, float]:
    """Return (v_n, v_r, g): new, remanufactured, and adjusted new value.

    ``g = v_n + beta * (v_n - v_r) = (1 + beta - alpha*beta) * delta * V``.
    """
    v_n = params.new_value
    v_r = perc.alpha * v_n
    g = v_n + perc.beta * (v_n - v_r)
    return v_n, v_r, g


def _thresholds(p_n: float, p_r: float, params: MarketParams, perc: Perception):
    """Preference-line cut points (t1, t2, t3) for a two-product market.

    t1: indifference between new and remanufactured
    t2: indifference between new and buying nothing
    t3: indifference between remanufactured and buying nothing

    t2 is always the (a*t1 + b*t3) / (a+b) convex combination of the other
    two, so only the orderings t1 <= t3 and t3 < t1 can occur.  Singular
    denominators follow the published limits: equal perceived values
    (alpha=1 or beta=-1) send every buyer to the cheaper product with ties
    to new, and alpha=0 makes the remanufactured product worthless (no
    demand at any positive price).
    """
    v_n, v_r, g = perceived_values(params, perc)
    gap = (1.0 + perc.beta) * (1.0 - perc.alpha) * params.new_value  # g - v_r

    if v_r == 0.0:  # alpha = 0
        t3 = 0.0 if p_r == 0.0 else math.inf
    else:
        t3 = p_r / v_r
    t2 = p_n / g if g > 0.0 else math.inf
    if gap == 0.0:
        # value-identical products: cheaper wins, ties go to new
        t1 = math.inf if p_n > p_r else t3
    else:
        t1 = (p_n - p_r) / gap
    return t1, t2, t3


def demand_rates(
    p_n: float, p_r: float, params: MarketParams, perc: Perception
) -> tuple[float, float]:
    """Poisson demand rates (lam_n, lam_r) at prices (p_n, p_r).

    Only the admissible half-plane ``p_r <= p_n`` is defined.  Rates are
    clamped into [0, lam]; thresholds subtracted near equality can otherwise
    leave a -1e-16 residue.
    """
    if p_n < 0 or p_r < 0:
        raise ValueError("prices must be >= 0")
    if p_r > p_n:
        raise ValueError(f"admissible prices require p_r <= p_n, got {p_r} > {p_n}")
    t1, t2, t3 = _thresholds(p_n, p_r, params, perc)
    lam = params.lam
    lam_n = (1.0 - min(1.0, max(t1, t2))) * lam
    lam_r = max(0.0, min(1.0, t1) - min(1.0, t3)) * lam
    return min(max(lam_n, 0.0), lam), min(max(lam_r, 0.0), lam)


def classify_region(
    p_n: float, p_r: float, params: MarketParams, perc: Perception
) -> Region:
    """Label the market outcome at (p_n, p_r).

    Region boundaries belong to the side with new-product demand: a customer
    indifferent between the two products buys the new one.
    """
    if p_r > p_n:
        raise ValueError(f"admissible prices require p_r <= p_n, got {p_r} > {p_n}")
    t1, t2, t3 = _thresholds(p_n, p_r, params, perc)
    if t1 <= t3:  # new product wins every head-to-head comparison
        return Region.INFEASIBLE if t2 >= 1.0 else Region.NEW_ONLY
    if t3 >= 1.0:
        return Region.INFEASIBLE
    if t1 >= 1.0:
        return Region.REMAN_ONLY
    return Region.COEXISTENCE


def single_product_rate(p: float, v_eff: float, params: MarketParams) -> float:
    """Demand rate ``(1 - p/v_eff) * lam`` for a lone product of value v_eff."""
    if p < 0:
        raise ValueError(f"price must be >= 0, got {p}")
    if v_eff <= 0:
        return 0.0
    return max(0.0, 1.0 - p / v_eff) * params.lam
