"""Profit-maximizing prices and quantities for remanufacturing business models.

The library evaluates three ways an equipment manufacturer can run its
second-stage market -- selling new products only, remanufacturing in house,
or licensing remanufacturing to a third party under a two-part tariff --
when the number of potential customers is Poisson and each customer's
preference is uniform.  On top of the single-point optimizers it provides
perception-grid selection maps, market-dynamics and environmental-impact
summaries, contract sweeps, deterministic-vs-stochastic comparisons, and a
Monte Carlo market simulator used to validate every analytic expectation.
"""

__version__ = "0.1.0"

from .market import Contract, CostStructure, MarketParams, Perception, Region
from .models import Decision, Outcome

__all__ = [
    "Contract",
    "CostStructure",
    "Decision",
    "MarketParams",
    "Outcome",
    "Perception",
    "Region",
    "__version__",
]
