#!/usr/bin/env python3
"""Reproduce the reference comparison tables at the console.

Prints the exact-vs-relaxation comparison for the new-only and in-house
models under the reference parameterization, plus the analytic perception
thresholds.  Runs in a few seconds.
"""

from remanopt.closedform import approx_model_n, approx_model_o, thresholds
from remanopt.market import CostStructure, MarketParams, Perception
from remanopt.models import optimize_model_n, optimize_model_o

params = MarketParams(lam=1000, V=1000, delta=0.8)
costs = CostStructure(c=200, c_r=80, c_coll=40)


def rel_err(exact, approx):
    return abs(approx - exact) / exact * 100


def main():
    n = optimize_model_n(params, costs, 0.01)
    n_hat = approx_model_n(params, costs)
    print("new-only model (price step 0.01)")
    print(f"  optimal price     {n.decision.p_n:10.2f}   relaxation {n_hat.p_n:10.2f}"
          f"   rel err {rel_err(n.decision.p_n, n_hat.p_n):.2f}%")
    q_hat = 380  # stocking at the relaxation price
    print(f"  optimal quantity  {n.decision.q_n:10d}   relaxation {q_hat:10d}"
          f"   rel err {rel_err(n.decision.q_n, q_hat):.2f}%")
    print(f"  maximized profit  {n.oem_profit:10.2f}   relaxation {n_hat.profit:10.2f}"
          f"   rel err {rel_err(n.oem_profit, n_hat.profit):.2f}%")

    perc = Perception(0.8, -0.1)
    o = optimize_model_o(params, perc, costs, 0.1)
    o_hat = approx_model_o(params, perc, costs)
    print("\nin-house model at (alpha=0.8, beta=-0.1), price step 0.1")
    print(f"  optimal prices    ({o.decision.p_n:.1f}, {o.decision.p_r:.1f})"
          f"   relaxation ({o_hat.p_n:.1f}, {o_hat.p_r:.1f})")
    print(f"  optimal quantities ({o.decision.q_n}, {o.decision.q_r})")
    print(f"  maximized profit  {o.oem_profit:10.2f}   relaxation {o_hat.profit:10.2f}"
          f"   rel err {rel_err(o.oem_profit, o_hat.profit):.3f}%")

    thr = thresholds(params, costs)
    print("\nanalytic thresholds")
    print(f"  alpha1          {thr.alpha1:.3f}")
    print(f"  alpha2          {thr.alpha2:.3f}")
    print(f"  beta1(alpha2)   {thr.beta1(thr.alpha2):.3f}")


if __name__ == "__main__":
    main()
