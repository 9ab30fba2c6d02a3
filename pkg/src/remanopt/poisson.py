"""Numerically stable Poisson probability machinery.

Every demand and profit computation in this package reduces to Poisson
pmf/cdf evaluations at rates up to ~1000, where naive factorial-based
formulas overflow (k! overflows float64 beyond k=170).  All mass functions
here are evaluated in log space through the log-gamma function, and the
cdf goes through the regularized incomplete gamma function
``F(k, rate) = Q(k+1, rate)``, which is accurate to ~1e-14 in this regime.

Scalar entry points validate their arguments; the ``*_bulk`` variants are
unvalidated ndarray fast paths used inside the grid-search kernels.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

__all__ = [
    "pmf",
    "cdf",
    "inv_cdf",
    "expected_min",
    "cdf_bulk",
    "inv_cdf_bulk",
    "expected_min_bulk",
]


def _check_rate(rate: float) -> float:
    rate = float(rate)
    if not math.isfinite(rate) or rate < 0.0:
        raise ValueError(f"rate must be finite and >= 0, got {rate}")
    return rate


def _check_count(k, name: str = "k") -> int:
    if isinstance(k, float) and not k.is_integer():
        raise ValueError(f"{name} must be an integer, got {k}")
    return int(k)


def pmf(k: int, rate: float) -> float:
    """P(D = k) for D ~ Poisson(rate), computed in log space.

    Exact ``1.0`` for the empty-market corner (rate=0, k=0).
    """
    rate = _check_rate(rate)
    k = _check_count(k)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if rate == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(rate) - rate - math.lgamma(k + 1))


def cdf(k: int, rate: float) -> float:
    """P(D <= k) for D ~ Poisson(rate).

    ``k = -1`` returns 0 by the empty-sum convention, which keeps the
    reduced-form profit well defined when the optimal quantity is 0.
    """
    rate = _check_rate(rate)
    k = _check_count(k)
    if k < 0:
        return 0.0
    if rate == 0.0:
        return 1.0
    return float(special.gammaincc(k + 1.0, rate))


def _survival(k: int, rate: float) -> float:
    # P(D > k) without the 1 - cdf cancellation.
    if k < 0:
        return 1.0
    if rate == 0.0:
        return 0.0
    return float(special.gammainc(k + 1.0, rate))


def inv_cdf(y: float, rate: float) -> int:
    """Smallest integer k with ``cdf(k, rate) >= y``.

    Raises for ``y >= 1`` (would require an infinite quantity) and y < 0.
    """
    rate = _check_rate(rate)
    y = float(y)
    if not 0.0 <= y < 1.0:
        raise ValueError(f"y must lie in [0, 1), got {y}")
    if y == 0.0 or rate == 0.0:
        return 0
    return int(inv_cdf_bulk(np.asarray([y]), np.asarray([rate]))[0])


def expected_min(rate: float, q: int) -> float:
    """E[min(D, q)] for D ~ Poisson(rate).

    Uses the closed partial-expectation form
    ``rate * F(q-1) + q * P(D > q)`` rather than truncating the series.
    """
    rate = _check_rate(rate)
    q = _check_count(q, "q")
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    if q == 0:
        return 0.0
    return rate * cdf(q - 1, rate) + q * _survival(q, rate)


# ---------------------------------------------------------------------------
# ndarray fast paths (no validation; negative k allowed and treated as -1)
# ---------------------------------------------------------------------------

def cdf_bulk(k: np.ndarray, rate: np.ndarray) -> np.ndarray:
    """Vectorized ``cdf``; k may be any integer array, rate >= 0."""
    k = np.asarray(k, dtype=np.float64)
    rate = np.asarray(rate, dtype=np.float64)
    out = special.gammaincc(np.maximum(k, 0.0) + 1.0, np.maximum(rate, 1e-300))
    out = np.where(rate == 0.0, 1.0, out)
    return np.where(k < 0, 0.0, out)


def survival_bulk(k: np.ndarray, rate: np.ndarray) -> np.ndarray:
    """Vectorized P(D > k)."""
    k = np.asarray(k, dtype=np.float64)
    rate = np.asarray(rate, dtype=np.float64)
    out = special.gammainc(np.maximum(k, 0.0) + 1.0, np.maximum(rate, 1e-300))
    out = np.where(rate == 0.0, 0.0, out)
    return np.where(k < 0, 1.0, out)


def inv_cdf_bulk(y: np.ndarray, rate: np.ndarray) -> np.ndarray:
    """Vectorized min-k Poisson quantile.

    A Cornish-Fisher guess lands within a step or two of the answer near
    the mean (where every optimizer call lives); masked correction loops
    then walk the stragglers into place against the same gamma-based cdf
    used by ``cdf``, so quantile/cdf round trips are exactly consistent.
    """
    y_in = np.asarray(y, dtype=np.float64)
    rate_in = np.asarray(rate, dtype=np.float64)
    shape = np.broadcast_shapes(y_in.shape, rate_in.shape)
    y = np.broadcast_to(y_in, shape).ravel()
    rate = np.broadcast_to(rate_in, shape).ravel()
    z = special.ndtri(np.clip(y, 1e-300, 1.0 - 1e-16))
    guess = np.floor(rate + np.sqrt(rate) * z + (z * z - 1.0) / 6.0)
    k = np.maximum(guess, 0.0).astype(np.int64)
    # walk stragglers up while F(k) < y, touching only the active subset
    active = np.nonzero(cdf_bulk(k, rate) < y)[0]
    for _ in range(10_000):
        if active.size == 0:
            break
        k[active] += 1
        still = cdf_bulk(k[active], rate[active]) < y[active]
        active = active[still]
    # walk stragglers down while F(k-1) >= y
    active = np.nonzero((k > 0) & (cdf_bulk(k - 1, rate) >= y))[0]
    for _ in range(10_000):
        if active.size == 0:
            break
        k[active] -= 1
        still = (k[active] > 0) & (cdf_bulk(k[active] - 1, rate[active]) >= y[active])
        active = active[still]
    k[(y == 0.0) | (rate == 0.0)] = 0
    return k.reshape(shape)


def expected_min_bulk(rate: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorized E[min(D, q)]."""
    rate = np.asarray(rate, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    return rate * cdf_bulk(q - 1, rate) + q * survival_bulk(q, rate)
