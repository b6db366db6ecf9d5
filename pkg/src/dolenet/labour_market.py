"""Referral hiring, warning/embeddedness firing, social-comparison quitting,
and the unemployment-benefit schedule.

Hiring is restricted to unemployed candidates with at least one
well-performing friend already at the firm, except that once benefits have
expired the unemployed signal themselves and can be hired without a
referral. Firing targets warned workers who are also less socially
embedded than their colleagues. Quitting compares own wage and
satisfaction against employed friends and is likewise damped by
embeddedness.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

HIRE, FIRE, QUIT, SIGNAL_HIRE = "hire", "fire", "quit", "signal-hire"


@dataclass
class BenefitScheme:
    """Replacement rate, poverty floor and expiry rule of the dole."""

    replacement_rate: float
    max_duration: int
    poverty_rate: float = 0.60
    expiry_mode: str = "calendar"   # compare sim time, or the own spell

    def __post_init__(self):
        if not 0.0 < self.replacement_rate < 1.0:
            raise ValueError("replacement rate must lie in (0, 1)")
        if self.max_duration <= 0:
            raise ValueError("max duration must be positive")
        if self.poverty_rate != 0.60:
            raise ValueError("the poverty-line rate is fixed at 0.60")


def benefit_payment(last_wage: float, median_wage: float, clock: int,
                    scheme: BenefitScheme) -> float:
    """Dole for one unemployed household.

    The larger of the earnings-related benefit and the poverty-line dole
    while the clock is below the maximum duration; the poverty floor alone
    afterwards. ``clock`` is simulation time in calendar mode and the
    household's own unemployment spell in spell mode. Households never
    employed before have no reference wage and receive the floor only.
    """
    floor = scheme.poverty_rate * median_wage
    if clock >= scheme.max_duration or not np.isfinite(last_wage):
        return floor
    return max(scheme.replacement_rate * last_wage, floor)


def benefits_vector(unemployed_ids: np.ndarray, last_wage: np.ndarray,
                    u_spell: np.ndarray, median_wage: float, t: int,
                    scheme: BenefitScheme) -> np.ndarray:
    """Benefit per unemployed household, in the order of ``unemployed_ids``."""
    clocks = (np.full(len(unemployed_ids), t)
              if scheme.expiry_mode == "calendar"
              else u_spell[unemployed_ids])
    floor = scheme.poverty_rate * median_wage
    lw = last_wage[unemployed_ids]
    related = np.where(np.isfinite(lw),
                       np.maximum(scheme.replacement_rate * lw, floor),
                       floor)
    return np.where(clocks < scheme.max_duration, related, floor)


def benefits_expired(u_spell: np.ndarray, t: int, scheme: BenefitScheme,
                     unemployed: np.ndarray) -> np.ndarray:
    """Mask of households whose benefits have run out (the signallers)."""
    if scheme.expiry_mode == "calendar":
        return unemployed & (t >= scheme.max_duration)
    return unemployed & (u_spell >= scheme.max_duration)


def referrer_ok(warnings_total: np.ndarray, last_warning_step: np.ndarray,
                t: int) -> np.ndarray:
    """Employees whose referral counts: clean last period or under 3 warnings."""
    return (last_warning_step != t - 1) | (warnings_total < 3)


def referral_candidates(unemployed: np.ndarray, prev_roster: np.ndarray,
                        adjacency: np.ndarray, roster: np.ndarray,
                        warnings_total: np.ndarray,
                        last_warning_step: np.ndarray, t: int) -> np.ndarray:
    """Ids hireable by one firm through a referral.

    Pool: currently unemployed, not employed by this firm last period.
    Eligible: at least one friend on the firm's current roster who passes
    the referrer check.
    """
    pool = unemployed & ~prev_roster
    if not pool.any() or len(roster) == 0:
        return np.empty(0, dtype=np.int64)
    good = roster[referrer_ok(warnings_total[roster],
                              last_warning_step[roster], t)]
    if len(good) == 0:
        return np.empty(0, dtype=np.int64)
    # Adjacency is symmetric; row gathers are contiguous and faster.
    has_referrer = adjacency[good].any(axis=0)
    return np.flatnonzero(pool & has_referrer)


def order_by_spell(candidates: np.ndarray, u_spell: np.ndarray) -> np.ndarray:
    """Longest unemployment spell first, ids as tie-break."""
    if len(candidates) == 0:
        return candidates
    order = np.lexsort((candidates, -u_spell[candidates]))
    return candidates[order]


def select_hires(candidates: np.ndarray, n_to_hire: int,
                 u_spell: np.ndarray) -> np.ndarray:
    """Take up to ``n_to_hire`` candidates, longest spells first."""
    return order_by_spell(candidates, u_spell)[:n_to_hire]


def fire_candidates(roster: np.ndarray, warnings_total: np.ndarray,
                    last_warning_step: np.ndarray, t: int,
                    ebar: np.ndarray, rule: str = "or") -> np.ndarray:
    """Roster members eligible for dismissal, worst warned first.

    The warning predicate marks workers with at least three warnings or a
    warning received last period (``rule="and"`` requires both); the
    embeddedness predicate keeps anyone at or above the mean intensity of
    the other roster members. Only workers in both sets can be fired.
    """
    if len(roster) == 0:
        return roster
    w = warnings_total[roster]
    recent = last_warning_step[roster] == t - 1
    if rule == "or":
        warned = (w >= 3) | recent
    elif rule == "and":
        warned = (w >= 3) & recent
    else:
        raise ValueError(f"unknown fire rule {rule!r}")
    if len(roster) < 2:
        return np.empty(0, dtype=roster.dtype)
    mean_others = (ebar.sum() - ebar) / (len(roster) - 1)
    low_embedded = ebar < mean_others
    eligible = roster[warned & low_embedded]
    if len(eligible) == 0:
        return eligible
    order = np.lexsort((eligible, -warnings_total[eligible]))
    return eligible[order]


def quit_mask(employer: np.ndarray, employer_prev: np.ndarray,
              wage: np.ndarray, wage_prev: np.ndarray,
              satisfaction: np.ndarray, adjacency: np.ndarray,
              ebar: np.ndarray, ebar_firm_mean_others: np.ndarray,
              wage_drop: float = 0.0) -> np.ndarray:
    """Who walks out at the end of the step.

    Eligible: employed at the same firm this period and last. They quit
    when their wage fell (by more than the materiality fraction
    ``wage_drop``) and is below their employed friends' mean wage, or they
    are less satisfied than those friends -- provided they are less
    embedded than the rest of their roster. No employed friends, no quit.
    """
    employed = employer >= 0
    eligible = employed & (employer == employer_prev)
    wage_fell = wage < wage_prev * (1.0 - wage_drop)
    base = eligible & wage_fell & (ebar < ebar_firm_mean_others)
    if not base.any():
        return np.zeros_like(base)

    adj = (adjacency if adjacency.dtype.kind == "f"
           else adjacency.astype(np.float64))
    emp_f = employed.astype(adj.dtype)
    n_friends = adj @ emp_f
    mean_wage = (adj @ (wage * emp_f).astype(adj.dtype)) \
        / np.maximum(n_friends, 1.0)
    mean_sat = (adj @ (satisfaction * emp_f).astype(adj.dtype)) \
        / np.maximum(n_friends, 1.0)
    social = (wage < mean_wage) | (satisfaction < mean_sat)
    return base & (n_friends > 0) & social


@dataclass
class EventLog:
    """Append-only record of every hire, fire, quit and signalling hire."""

    events: list[tuple[int, str, int, int]] = field(default_factory=list)

    def add(self, step: int, kind: str, household: int, firm: int) -> None:
        self.events.append((step, kind, household, firm))

    def count(self, step: int, kinds: tuple[str, ...]) -> int:
        return sum(1 for e in self.events if e[0] == step and e[1] in kinds)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "kind", "household", "firm"])
            writer.writerows(self.events)

    def replay(self, employer_0: np.ndarray, t_max: int) -> np.ndarray:
        """Roster evolution implied by the log alone.

        Returns employer-per-household at the end of each step, starting
        from the initial assignment; used to verify the log is a complete
        account of every transition.
        """
        employer = employer_0.copy()
        out = np.empty((t_max + 1, len(employer_0)), dtype=employer_0.dtype)
        out[0] = employer
        by_step: dict[int, list[tuple[str, int, int]]] = {}
        for step, kind, hh, firm in self.events:
            by_step.setdefault(step, []).append((kind, hh, firm))
        for t in range(1, t_max + 1):
            for kind, hh, firm in by_step.get(t, ()):
                if kind in (HIRE, SIGNAL_HIRE):
                    employer[hh] = firm
                else:
                    employer[hh] = -1
            out[t] = employer
        return out


def update_spells(unemployed: np.ndarray, u_spell: np.ndarray,
                  e_spell: np.ndarray) -> None:
    """Advance both duration counters from end-of-step employment status."""
    u_spell[unemployed] += 1
    e_spell[~unemployed] += 1


def normalized_mean_spell(spell: np.ndarray, mask: np.ndarray,
                          t: int) -> float:
    """Mean current spell of the masked group as a share of elapsed time."""
    if t <= 0 or not mask.any():
        return 0.0
    return float(spell[mask].mean()) / t
