"""Government, bank, central-bank and household-sector financial behaviour.

The government buys a fixed real quantity per firm at current prices,
taxes previous wages and issues bills residually. The bank accommodates
deposits and loans, holds reserves proportional to deposits, buys bills
with surplus funds and otherwise borrows advances. The central bank clears
the bills market and passes its profits to the government. Households
consume out of lagged income and deposits at their matched seller's price.
"""

from __future__ import annotations

import numpy as np


def government_spending(prices, g_per_firm: float) -> float:
    """Nominal purchases: a fixed real quantity per firm at current prices."""
    return g_per_firm * float(np.sum(prices))


def government_bills(bills_prev: float, spending: float, benefits: float,
                     taxes: float, cb_profits: float, i_bills: float) -> float:
    """Bills outstanding after the budget closes residually."""
    return (bills_prev + spending + benefits + i_bills * bills_prev
            - taxes - cb_profits)


def bank_step(deposits: float, loans: float, reserve_ratio: float,
              advances_ratio: float):
    """Reserve, bill and advance positions given deposits and loans.

    Reserves are a fixed fraction of deposits. While the bank has surplus
    funds over loans and reserves (keeping structural advances at
    ``advances_ratio`` of deposits) it buys bills; otherwise bills are zero
    and advances make the balance sheet close. The two branches agree at
    the boundary, and both keep assets equal to liabilities so the flow
    matrix stays consistent whichever branch is active.
    """
    reserves = reserve_ratio * deposits
    surplus = deposits + advances_ratio * deposits - loans - reserves
    if surplus > 0.0:
        bills = surplus
        advances = advances_ratio * deposits
    else:
        bills = 0.0
        advances = reserves + loans - deposits
    return reserves, bills, advances


def bank_profits(loans_prev: float, bills_prev: float, reserves_prev: float,
                 deposits_prev: float, advances_prev: float,
                 i_loans: float, i_bills: float, i_deposits: float) -> float:
    """Interest received minus interest paid, all on last period's stocks."""
    return (i_loans * loans_prev + i_bills * bills_prev
            + i_bills * reserves_prev - i_deposits * deposits_prev
            - i_bills * advances_prev)


def central_bank_step(bills_gov: float, bills_bank: float):
    """Residual bill holdings of the central bank."""
    bills_cb = bills_gov - bills_bank
    if bills_cb < 0.0:
        raise RuntimeError(
            f"bills market cannot clear: bank demand {bills_bank} exceeds "
            f"bills outstanding {bills_gov}")
    return bills_cb


def central_bank_profits(bills_cb_prev: float, reserves_prev: float,
                         advances_prev: float, i_bills: float) -> float:
    """Interest on bill holdings and advances minus interest on reserves."""
    return i_bills * (bills_cb_prev - reserves_prev + advances_prev)


def consumption_demand(yd_prev: np.ndarray, deposits_prev: np.ndarray,
                       price_matched: np.ndarray,
                       alpha_1: float, alpha_2: float) -> np.ndarray:
    """Real consumption demand per household at the matched seller's price."""
    nominal = alpha_1 * yd_prev + alpha_2 * deposits_prev
    return np.maximum(nominal, 0.0) / price_matched


def household_taxes(wage_prev: np.ndarray, tau: float) -> np.ndarray:
    """Tax due on the previous period's individual wage bill."""
    return tau * wage_prev


def disposable_income(wages: np.ndarray, benefits: np.ndarray,
                      profit_share: float, deposits_prev: np.ndarray,
                      i_deposits: float, taxes: np.ndarray) -> np.ndarray:
    """Wages or benefits plus distributed profits and deposit interest, net."""
    return (wages + benefits + profit_share
            + i_deposits * deposits_prev - taxes)
