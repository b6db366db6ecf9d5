"""Sectoral stocks, per-step transaction flows, and consistency checks.

Every monetary flow the engine executes is booked twice (source and sink)
into a :class:`FlowMatrix`. At the end of each step the matrix rows and
columns, the balance-sheet rows and columns, and the one identity left out
of the behavioural equations (reserves = central-bank bills + advances)
are all checked against a relative tolerance. A violation means the step
logic lost or created money, so by default the run aborts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SECTOR_ACCOUNTS = (
    "government",
    "firms_current",
    "firms_capital",
    "households",
    "bank_current",
    "bank_capital",
    "cb_current",
    "cb_capital",
)

FLOWS = (
    "consumption",
    "govt_expenditure",
    "inventory_change",
    "wages",
    "taxes",
    "unemployment_benefits",
    "interest_bills",
    "interest_loans",
    "interest_reserves",
    "interest_advances",
    "interest_deposits",
    "profits_firms",
    "profits_bank",
    "profits_cb",
    "d_bills",
    "d_loans",
    "d_deposits",
    "d_hpm",
    "d_advances",
)

# Which (flow, account) cells may be written, per the transaction layout.
VALID_CELLS: dict[str, tuple[str, ...]] = {
    "consumption": ("firms_current", "households"),
    "govt_expenditure": ("government", "firms_current"),
    "inventory_change": ("firms_current", "firms_capital"),
    "wages": ("firms_current", "households"),
    "taxes": ("government", "households"),
    "unemployment_benefits": ("government", "households"),
    "interest_bills": ("government", "bank_current", "cb_current"),
    "interest_loans": ("firms_current", "bank_current"),
    "interest_reserves": ("bank_current", "cb_current"),
    "interest_advances": ("bank_current", "cb_current"),
    "interest_deposits": ("households", "bank_current"),
    "profits_firms": ("firms_current", "households"),
    "profits_bank": ("bank_current", "households"),
    "profits_cb": ("cb_current", "government"),
    "d_bills": ("government", "bank_capital", "cb_capital"),
    "d_loans": ("firms_capital", "bank_capital"),
    "d_deposits": ("households", "bank_capital"),
    "d_hpm": ("bank_capital", "cb_capital"),
    "d_advances": ("bank_capital", "cb_capital"),
}

_FLOW_INDEX = {name: i for i, name in enumerate(FLOWS)}
_ACCOUNT_INDEX = {name: i for i, name in enumerate(SECTOR_ACCOUNTS)}


class UnknownCellError(KeyError):
    """A flow was booked into a cell the transaction layout does not define."""


class SFCViolationError(RuntimeError):
    """A consistency check exceeded tolerance during a simulation step."""

    def __init__(self, step: int, report: "ConsistencyReport"):
        self.step = step
        self.report = report
        worst = report.worst()
        super().__init__(
            f"stock-flow consistency violated at step {step}: "
            f"{worst[0]} '{worst[1]}' residual {worst[2]:.3e}")


class FlowMatrix:
    """One step's transaction flows, indexed (flow, sector-account)."""

    def __init__(self):
        self.cells = np.zeros((len(FLOWS), len(SECTOR_ACCOUNTS)))

    def record(self, flow: str, account: str, amount: float) -> None:
        """Accumulate ``amount`` into a cell; counterpart is the caller's job."""
        if flow not in VALID_CELLS:
            raise UnknownCellError(f"unknown flow {flow!r}")
        if account not in VALID_CELLS[flow]:
            raise UnknownCellError(
                f"account {account!r} is not a defined cell of flow {flow!r}")
        self.cells[_FLOW_INDEX[flow], _ACCOUNT_INDEX[account]] += amount

    def row_sums(self) -> np.ndarray:
        return self.cells.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.cells.sum(axis=0)

    def row_volumes(self) -> np.ndarray:
        return np.abs(self.cells).sum(axis=1)

    def col_volumes(self) -> np.ndarray:
        return np.abs(self.cells).sum(axis=0)


@dataclass
class BalanceSheet:
    """End-of-step stocks plus flow-accumulated sector net worths.

    The net-worth fields are updated from the flow matrix (never recomputed
    from stocks), so the column checks verify that cumulative flows and
    stock positions agree.
    """

    inventories: float = 0.0   # firms, valued at unit cost
    loans: float = 0.0
    deposits_hh: float = 0.0
    deposits_bank: float = 0.0
    bills_gov: float = 0.0
    bills_bank: float = 0.0
    bills_cb: float = 0.0
    reserves: float = 0.0
    advances: float = 0.0
    nw_firms: float = 0.0
    nw_households: float = 0.0
    nw_bank: float = 0.0
    gov_debt: float = 0.0      # government balance item, +GD

    def row_entries(self) -> dict[str, tuple[float, float]]:
        """Instrument rows as (residual, gross volume).

        Every row nets to zero except inventories, whose counterpart is the
        firms' balance item rather than another sector.
        """
        rows = {
            "loans": (-self.loans + self.loans, 2 * abs(self.loans)),
            "deposits": (self.deposits_hh - self.deposits_bank,
                         abs(self.deposits_hh) + abs(self.deposits_bank)),
            "bills": (self.bills_bank - self.bills_gov + self.bills_cb,
                      abs(self.bills_bank) + abs(self.bills_gov)
                      + abs(self.bills_cb)),
            "high_powered_money": (self.reserves - self.reserves,
                                   2 * abs(self.reserves)),
            "advances": (-self.advances + self.advances,
                         2 * abs(self.advances)),
        }
        return rows

    def col_entries(self) -> dict[str, tuple[float, float]]:
        """Sector columns as (residual, gross volume), balance item included."""
        cols = {
            "firms": (self.inventories - self.loans - self.nw_firms,
                      abs(self.inventories) + abs(self.loans)
                      + abs(self.nw_firms)),
            "households": (self.deposits_hh - self.nw_households,
                           abs(self.deposits_hh) + abs(self.nw_households)),
            "bank": (self.loans - self.deposits_bank + self.bills_bank
                     + self.reserves - self.advances - self.nw_bank,
                     abs(self.loans) + abs(self.deposits_bank)
                     + abs(self.bills_bank) + abs(self.reserves)
                     + abs(self.advances) + abs(self.nw_bank)),
            "government": (-self.bills_gov + self.gov_debt,
                           abs(self.bills_gov) + abs(self.gov_debt)),
            "central_bank": (self.bills_cb - self.reserves + self.advances,
                             abs(self.bills_cb) + abs(self.reserves)
                             + abs(self.advances)),
        }
        return cols


def redundant_identity(bs: BalanceSheet) -> float:
    """Residual of the identity never imposed by the step logic.

    Reserves held at the central bank must equal central-bank bill holdings
    plus advances; the value returned is ``H - (Bcb + A)``.
    """
    return bs.reserves - (bs.bills_cb + bs.advances)


@dataclass
class ConsistencyReport:
    """Per-row/per-column residuals of one step's checks."""

    step: int
    entries: list[tuple[str, str, float, float, bool]] = field(
        default_factory=list)

    def add(self, scope: str, name: str, residual: float, volume: float,
            tol_rel: float) -> None:
        flagged = abs(residual) > tol_rel * max(1.0, volume)
        self.entries.append((scope, name, residual, volume, flagged))

    @property
    def ok(self) -> bool:
        return not any(e[4] for e in self.entries)

    def worst(self) -> tuple[str, str, float]:
        scope, name, res, vol, _ = max(
            self.entries, key=lambda e: abs(e[2]) / max(1.0, e[3]))
        return scope, name, res

    def flagged(self) -> list[tuple[str, str, float, float, bool]]:
        return [e for e in self.entries if e[4]]


def check_consistency(bs: BalanceSheet, fm: FlowMatrix,
                      tol_rel: float = 1e-6,
                      step: int = 0) -> ConsistencyReport:
    """Check all flow rows/columns and balance-sheet rows/columns.

    Residuals are flagged when ``|residual| > tol_rel * max(1, volume)``
    where volume is the gross sum of absolute cell values involved.
    """
    report = ConsistencyReport(step=step)
    rows = fm.row_sums()
    rvol = fm.row_volumes()
    for i, name in enumerate(FLOWS):
        report.add("flow_row", name, float(rows[i]), float(rvol[i]), tol_rel)
    cols = fm.col_sums()
    cvol = fm.col_volumes()
    for i, name in enumerate(SECTOR_ACCOUNTS):
        report.add("flow_col", name, float(cols[i]), float(cvol[i]), tol_rel)
    for name, (res, vol) in bs.row_entries().items():
        report.add("stock_row", name, res, vol, tol_rel)
    for name, (res, vol) in bs.col_entries().items():
        report.add("stock_col", name, res, vol, tol_rel)
    report.add("identity", "reserves_vs_cb_assets", redundant_identity(bs),
               abs(bs.reserves), tol_rel)
    return report


def write_reports_csv(reports: list[ConsistencyReport],
                      path: str | Path) -> None:
    """Dump per-step residuals as CSV (step, scope, name, residual, flagged)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "scope", "name", "residual", "flagged"])
        for report in reports:
            for scope, name, residual, _, flagged in report.entries:
                writer.writerow([report.step, scope, name,
                                 repr(residual), int(flagged)])
