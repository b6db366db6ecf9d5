"""Firm-level pricing, expectations, production planning and settlement.

Pure functions over scalars or numpy arrays; the engine applies them per
firm in id order. Prices are a markup on last period's unit cost, output
plans chase expected sales plus an inventory-gap adjustment capped by the
workforce's potential output, and loans move one-for-one with the nominal
value of inventories.
"""

from __future__ import annotations

import math

import numpy as np


def set_price(unit_cost_prev: float, markup: float) -> float:
    """Markup rule over last period's unit cost."""
    if unit_cost_prev <= 0.0:
        raise ValueError(f"unit cost must be positive, got {unit_cost_prev}")
    return unit_cost_prev * (1.0 + markup)


def expected_sales(sales_prev: float, expected_prev: float, beta: float,
                   mode: str = "adaptive") -> float:
    """Update the sales expectation.

    ``adaptive`` closes a fraction beta of the last expectation error and
    is anchored at the stationary state. ``as-written`` blends last sales
    with the last error instead (beta = 1 collapses both to last sales).
    """
    if mode == "adaptive":
        return expected_prev + beta * (sales_prev - expected_prev)
    if mode == "as-written":
        return beta * sales_prev + (1.0 - beta) * (sales_prev - expected_prev)
    raise ValueError(f"unknown expectation mode {mode!r}")


def plan_output(s_exp: float, inv_prev: float, sigma_inv: float,
                lambda_exp: float, y_pot: float = math.inf):
    """Inventory targets and the production plan.

    Returns (inv_target, inv_expected, y) with y the output needed to meet
    expected sales plus the planned inventory build-up, floored at 0 and
    capped at potential output. Pass ``y_pot=inf`` when planning before the
    workforce's potential is realized.
    """
    inv_target = sigma_inv * s_exp
    inv_expected = inv_prev + lambda_exp * (inv_target - inv_prev)
    y = min(max(s_exp + inv_expected - inv_prev, 0.0), y_pot)
    return inv_target, inv_expected, y


def unit_cost(wage_bill: float, output: float, unit_cost_prev: float) -> float:
    """Wage bill per unit produced; carries over when nothing is produced."""
    if output <= 0.0:
        return unit_cost_prev
    return wage_bill / output


def labour_demand(y_planned: float, mean_worker_output: float,
                  n_prev: int, fallback_output: float = 0.0) -> int:
    """Workers needed to produce the planned output, rounded up.

    Falls back to the economy-wide mean output per worker when the firm has
    no roster history; with no usable denominator at all the firm keeps its
    current headcount.
    """
    if y_planned <= 0.0:
        return 0
    denom = mean_worker_output if mean_worker_output > 0.0 else fallback_output
    if denom <= 0.0:
        return n_prev
    return math.ceil(y_planned / denom)


def ration_consumers(real_demands: np.ndarray, gov_demand: float,
                     supply: float):
    """Scale purchases homogeneously so sales never exceed supply.

    Household purchases are all scaled by the same factor; government
    purchases are only cut once household demand alone exceeds supply.
    Returns (rationed household demands, rationed government demand).
    """
    demands = np.asarray(real_demands, dtype=float)
    hh_total = demands.sum()
    if hh_total + gov_demand <= supply:
        return demands, gov_demand
    room = supply - gov_demand
    if room >= 0.0:
        factor = room / hh_total if hh_total > 0.0 else 0.0
        return demands * factor, gov_demand
    return np.zeros_like(demands), max(supply, 0.0)


def settle(sales: float, output: float, inv_prev: float, uc: float,
           loans_prev: float, consumption_received: float,
           gov_received: float, wage_bill: float, i_loans: float,
           inv_nominal_prev: float):
    """Post-market inventory, loan and profit accounting.

    Returns (inv, inv_nominal, d_inv_nominal, loans, profits). Inventories
    are valued at the current unit cost and loans absorb exactly the change
    in their nominal value.
    """
    inv = inv_prev + output - sales
    if inv < -1e-9:
        raise RuntimeError(
            f"negative inventories after rationing: {inv}")
    inv = max(inv, 0.0)
    inv_nominal = inv * uc
    d_inv = inv_nominal - inv_nominal_prev
    loans = loans_prev + d_inv
    profits = (consumption_received + gov_received + d_inv
               - wage_bill - i_loans * loans_prev)
    return inv, inv_nominal, d_inv, loans, profits
