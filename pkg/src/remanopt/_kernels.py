"""Vectorized grid-search kernels shared by the model optimizers.

The optimizers maximize over price lattices anchored at the lower end of
each open support interval, ``p_i = lower + i*step``.  Two objectives are
supported at the fractile-consistent quantity q(p):

``table``
    The reduced-form value ``p * rate * F(q-1, rate)`` obtained by folding
    the critical-fractile condition into the expected-sales series.  This
    is the quantity tabulated in the reference numerical experiments, and
    it upper-bounds the plain expectation below.

``expectation``
    The plain expected profit ``p * E[min(D, q)] - cost * q``.

Both objectives are bounded above by the deterministic-relaxation value
``(p - cost) * rate``, which is what makes sound window pruning possible:
a lattice point whose relaxation value is below an already-achieved
objective value can never be the argmax.
"""

from __future__ import annotations

import numpy as np

from . import poisson

TABLE = "table"
EXPECTATION = "expectation"
DETERMINISTIC = "deterministic"
_OBJECTIVES = (TABLE, EXPECTATION, DETERMINISTIC)

MIN_K = "min-k"
FLOOR = "floor"
DET_FLOOR = "det-floor"
DET_CEIL = "det-ceil"
_STOCK_RULES = (MIN_K, FLOOR, DET_FLOOR, DET_CEIL)


def default_stock_rule(objective: str) -> str:
    return DET_FLOOR if objective == DETERMINISTIC else MIN_K

# Hard cap on points evaluated in one vectorized chunk (memory control).
_CHUNK = 2_000_000


def check_objective(objective: str) -> str:
    if objective not in _OBJECTIVES:
        raise ValueError(f"objective must be one of {_OBJECTIVES}, got {objective!r}")
    return objective


def price_grid(lower: float, upper: float, step: float) -> np.ndarray:
    """Lattice over the open interval (lower, upper): lower + step, ..., < upper."""
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    n = int(round((upper - lower) / step))
    if n < 2:
        return np.empty(0, dtype=np.float64)
    return lower + np.arange(1, n, dtype=np.float64) * step


def snap_to_grid(value: float, lower: float, step: float) -> float:
    """Nearest lattice point ``lower + i*step`` to ``value``."""
    return lower + round((value - lower) / step) * step


def objective_values(p, rate, q, unit_cost, objective):
    """Objective at stocking-consistent (p, q) pairs, vectorized."""
    if objective == TABLE:
        return p * rate * poisson.cdf_bulk(q - 1, rate)
    if objective == DETERMINISTIC:
        return p * np.minimum(rate, q) - unit_cost * q
    return p * poisson.expected_min_bulk(rate, q) - unit_cost * q


def fractile_bulk(p, rate, unit_cost, rule=MIN_K):
    """Vectorized stocking quantity at prices p and rates rate.

    ``min-k``: smallest k whose cdf reaches the critical fractile 1 - cost/p.
    ``floor``: the lower integer of the continuous fractile crossing (one
    below min-k except exactly at a probability mass point).
    ``det-floor`` / ``det-ceil``: deterministic-market stock at the demand
    rate itself, rounded down or up.  Grid edges with p <= cost stock
    nothing under every rule.
    """
    if rule is True or rule is False:  # legacy boolean floor flag
        rule = FLOOR if rule else MIN_K
    if rule not in _STOCK_RULES:
        raise ValueError(f"rule must be one of {_STOCK_RULES}, got {rule!r}")
    p = np.asarray(p, dtype=np.float64)
    rate = np.asarray(rate, dtype=np.float64)
    if rule == DET_FLOOR:
        q = np.floor(rate).astype(np.int64)
    elif rule == DET_CEIL:
        q = np.ceil(rate).astype(np.int64)
    else:
        y = np.clip(1.0 - unit_cost / np.maximum(p, 1e-300), 0.0, 1.0 - 1e-16)
        q = poisson.inv_cdf_bulk(y, rate)
        if rule == FLOOR:
            at_mass = poisson.cdf_bulk(q, rate) == y
            q = np.where(at_mass, q, np.maximum(q - 1, 0))
    q = np.where(p <= unit_cost, 0, q)
    return q


def scan_single_product(
    v_eff: float,
    unit_cost: float,
    lam: float,
    step: float,
    objective: str = TABLE,
    lo: float | None = None,
    hi: float | None = None,
    stock_rule: str | None = None,
):
    """Best (p, q, value) for a lone product of value v_eff on the price lattice.

    The lattice is anchored at ``unit_cost``; ``lo``/``hi`` optionally clip
    the scan to a sub-window of the support (used by the per-cell map
    optimizations where the optimum is known to sit near the closed form).
    Returns None when the support holds no lattice point.
    """
    p = price_grid(unit_cost, v_eff, step)
    if lo is not None or hi is not None:
        mask = np.ones(p.size, dtype=bool)
        if lo is not None:
            mask &= p >= lo
        if hi is not None:
            mask &= p <= hi
        p = p[mask]
    if p.size == 0:
        return None
    rate = (1.0 - p / v_eff) * lam
    q = fractile_bulk(p, rate, unit_cost, stock_rule or default_stock_rule(objective))
    val = objective_values(p, rate, q, unit_cost, objective)
    i = int(np.argmax(val))  # first max = lowest price
    return float(p[i]), int(q[i]), float(val[i])


def single_product_values(p, v_eff, unit_cost, lam, objective=TABLE, stock_rule=None):
    """Objective value of a lone product at each price in ``p`` (array).

    Prices at or beyond the choke value earn zero.
    """
    p = np.asarray(p, dtype=np.float64)
    rate = np.maximum(1.0 - p / v_eff, 0.0) * lam if v_eff > 0 else np.zeros_like(p)
    q = fractile_bulk(p, rate, unit_cost, stock_rule or default_stock_rule(objective))
    q = np.where(rate <= 0.0, 0, q)
    vals = objective_values(p, rate, q, unit_cost, objective)
    return q, np.where(rate <= 0.0, 0.0, vals)


class CoexistenceGeometry:
    """Closed-form description of the two-product coexistence problem.

    In the coexistence region the deterministic relaxation separates into
    two independent single-product problems, one in the price gap
    ``u = p_n - p_r`` (value ``a``, cost ``c - k``) and one in ``p_r``
    (value ``b``, cost ``k``)::

        relax(u, p_r) = lam*(u - (c-k))*(1 - u/a) + lam*(p_r - k)*(1 - p_r/b)

    so its level sets are axis-aligned ellipses in (u, p_r) around the
    unconstrained critical point.  That is the pruning geometry used by
    :func:`scan_coexistence`.
    """

    def __init__(self, lam, new_value, alpha, beta, c, k):
        self.lam = lam
        self.a = (1.0 + beta) * (1.0 - alpha) * new_value  # new-vs-reman value gap
        self.b = alpha * new_value                          # reman value
        self.g = self.a + self.b                            # adjusted new value
        self.c = c
        self.k = k
        self.u_star = (self.a + c - k) / 2.0
        self.pr_star = (self.b + k) / 2.0

    @property
    def degenerate(self) -> bool:
        return self.a <= 0.0 or self.b <= 0.0

    def relax_peak(self) -> float:
        """Relaxation value at the unconstrained critical point."""
        lam, a, b, c, k = self.lam, self.a, self.b, self.c, self.k
        return lam * (a - (c - k)) ** 2 / (4.0 * a) + lam * (b - k) ** 2 / (4.0 * b)

    def window(self, floor_value: float):
        """Half-widths (du, dpr) of the ellipse {relax >= floor_value}."""
        depth = self.relax_peak() - floor_value
        if depth <= 0.0:
            return None
        du = float(np.sqrt(depth * self.a / self.lam))
        dpr = float(np.sqrt(depth * self.b / self.lam))
        return du, dpr


def scan_coexistence(
    geom: CoexistenceGeometry,
    step: float,
    floor_value: float,
    objective: str = TABLE,
    stock_rule: str | None = None,
):
    """Exact argmax over coexistence-region lattice points beating floor_value.

    Enumerates the (u, p_r) ellipse {relaxation >= floor_value}, masks to
    the strict coexistence region (both demand rates positive, both sides
    actually stocked -- a zero-stock side is not on the market and belongs
    to the single-product axes), and evaluates the objective.  Every
    excluded candidate satisfies objective <= relaxation < floor_value, so
    when this returns a value >= floor_value it is the proven coexistence
    optimum.

    Returns (p_n, p_r, q_n, q_r, value) or None.
    """
    if geom.degenerate:
        return None
    win = geom.window(floor_value)
    if win is None:
        return None
    du, dpr = win
    lam, a, b, c, k, g = geom.lam, geom.a, geom.b, geom.c, geom.k, geom.g

    # u lives on the lattice {(c - k) + m*step}: difference of the two grids.
    u_lo = snap_to_grid(geom.u_star - du, c - k, step) - step
    u_hi = snap_to_grid(geom.u_star + du, c - k, step) + step
    pr_lo = max(snap_to_grid(geom.pr_star - dpr, k, step) - step, k + step)
    pr_hi = min(snap_to_grid(geom.pr_star + dpr, k, step) + step, b - step)
    nu = int(round((u_hi - u_lo) / step)) + 1
    npr = int(round((pr_hi - pr_lo) / step)) + 1
    if nu <= 0 or npr <= 0:
        return None

    best = None
    u_all = u_lo + np.arange(nu, dtype=np.float64) * step
    rows_per_chunk = max(1, _CHUNK // max(nu, 1))
    for start in range(0, npr, rows_per_chunk):
        pr_1d = pr_lo + np.arange(start, min(start + rows_per_chunk, npr)) * step
        U, PR = np.meshgrid(u_all, pr_1d, indexing="ij")
        U = U.ravel()
        PR = PR.ravel()
        PN = U + PR
        t1 = U / a
        t3 = PR / b
        keep = (
            (PN > c) & (PN < g)
            & (t1 < 1.0) & (t3 < t1)          # strict coexistence
            & ((U - geom.u_star) ** 2 * (lam / a)
               + (PR - geom.pr_star) ** 2 * (lam / b)
               <= geom.relax_peak() - floor_value + 1e-9)
        )
        if not keep.any():
            continue
        U, PR, PN, t1, t3 = U[keep], PR[keep], PN[keep], t1[keep], t3[keep]
        rate_n = (1.0 - t1) * lam
        rate_r = (t1 - t3) * lam
        rule = stock_rule or default_stock_rule(objective)
        qn = fractile_bulk(PN, rate_n, c, rule)
        qr = fractile_bulk(PR, rate_r, k, rule)
        stocked = (qn >= 1) & (qr >= 1)
        if not stocked.any():
            continue
        PN, PR, rate_n, rate_r = PN[stocked], PR[stocked], rate_n[stocked], rate_r[stocked]
        qn, qr = qn[stocked], qr[stocked]
        val = objective_values(PN, rate_n, qn, c, objective) + objective_values(
            PR, rate_r, qr, k, objective
        )
        i = int(np.argmax(val))
        cand = (float(PN[i]), float(PR[i]), int(qn[i]), int(qr[i]), float(val[i]))
        if best is None or cand[4] > best[4] or (
            cand[4] == best[4] and (cand[0], cand[1]) < (best[0], best[1])
        ):
            best = cand
    return best


def coexistence_optimum(
    geom: CoexistenceGeometry,
    step: float,
    seed_floor: float,
    objective: str = TABLE,
    stock_rule: str | None = None,
    core_depth: float = 60.0,
):
    """Two-pass coexistence search: cheap core scan to raise the floor, then
    one sound completion pass at the raised floor."""
    if geom.degenerate:
        return None
    peak = geom.relax_peak()
    if peak <= seed_floor:
        return None
    core = scan_coexistence(
        geom, step, max(seed_floor, peak - core_depth), objective, stock_rule
    )
    floor = seed_floor
    if core is not None:
        floor = max(floor, core[4])
    final = scan_coexistence(geom, step, floor, objective, stock_rule)
    if final is None:
        return core
    if core is not None and core[4] > final[4]:
        return core
    return final
