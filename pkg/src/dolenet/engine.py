"""Stationary-state initialization, the seven-phase timeline, and the
replicate runner.

Each period runs, in order: (1) pricing, output planning and labour
demand; (2) firing, referral hiring, then signalling hires; (3) time
allocation, production, monitoring, wage payment and (on review steps)
strategy adaptation; (4) benefits, taxes and consumption with homogeneous
rationing; (5) loans, bank profits, disposable income and deposits;
(6) central-bank profits and bills issuance; (7) quitting. Spell counters
advance and the full set of consistency checks runs at the end of every
step.

The initial state is a solved stationary configuration: all households
employed at the base wage, stocks and flows constant under the step map.
The published reference values do not close the public budget at their
own tax figure, so the wage-tax rate is solved endogenously (imposing a
constant bill stock and zero central-bank profit) and any resulting
deviations from the reference values are reported rather than hidden.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import aggregates as agg
from . import behavior, firms, labour_market
from .accounting import (BalanceSheet, ConsistencyReport, FlowMatrix,
                         SFCViolationError, check_consistency)
from .labour_market import BenefitScheme, EventLog
from .params import ScenarioConfig

UNEMPLOYED = -1


class InitializationError(RuntimeError):
    """The stationary-state solve failed or is inconsistent."""


# Reference initial values the solved state is compared against.
REFERENCE_STATIONARY = {
    "output": 558.787517,
    "wage": 8.0,
    "wage_bill": 4000.0,
    "unit_cost": 7.158356,
    "price": 10.021698,
    "expected_sales": 558.787517,
    "inventories_real": 558.787517,
    "inventories_nominal": 4000.0,
    "gov_spending": 1002.16984,
    "consumption_real": 458.787517,
    "benefits": 0.0,
    "taxes": 720.0,
    "consumption_nominal": 4597.830153,
    "disposable_income": 4597.830153,
    "deposits": 4502.908765,
    "loans": 4000.0,
    "firm_profits": 1580.0,
    "reserves": 1576.018067,
    "bank_bills": 0.0,
    "advances": 1073.109302,
    "bank_profits": 8.5029087,
    "cb_bills": 502.9087653,
    "cb_profits": 0.0,
    "bills": 502.9087653,
}


@dataclass
class StationaryState:
    """Solved economy-wide stationary aggregates."""

    output: float
    wage: float
    wage_bill: float
    unit_cost: float
    price: float
    gov_spending: float
    consumption_real: float
    consumption_nominal: float
    taxes: float
    tau_g: float
    alpha_2: float
    disposable_income: float
    deposits: float
    loans: float
    inventories_real: float
    inventories_nominal: float
    bills: float
    bank_bills: float
    cb_bills: float
    reserves: float
    advances: float
    firm_profits: float
    bank_profits: float
    cb_profits: float
    deviations: dict[str, tuple[float, float, float]] = field(
        default_factory=dict)

    def as_reference_dict(self) -> dict[str, float]:
        return {
            "output": self.output, "wage": self.wage,
            "wage_bill": self.wage_bill, "unit_cost": self.unit_cost,
            "price": self.price, "expected_sales": self.output,
            "inventories_real": self.inventories_real,
            "inventories_nominal": self.inventories_nominal,
            "gov_spending": self.gov_spending,
            "consumption_real": self.consumption_real, "benefits": 0.0,
            "taxes": self.taxes,
            "consumption_nominal": self.consumption_nominal,
            "disposable_income": self.disposable_income,
            "deposits": self.deposits, "loans": self.loans,
            "firm_profits": self.firm_profits, "reserves": self.reserves,
            "bank_bills": self.bank_bills, "advances": self.advances,
            "bank_profits": self.bank_profits, "cb_bills": self.cb_bills,
            "cb_profits": self.cb_profits, "bills": self.bills,
        }


def solve_stationary(config: ScenarioConfig) -> StationaryState:
    """Solve the full-employment stationary state.

    Damped fixed-point iteration on the aggregate vector, started from the
    reference values. Imposed: every household employed at the base wage,
    a constant debt-to-GDP ratio, zero bill issuance and zero central-bank
    profit. The wage-tax rate and the deposit consumption propensity are
    endogenous unless pinned in the config. Raises InitializationError if
    the iteration fails or the solved state violates any identity beyond
    1e-8 relative.
    """
    n_hh, n_f = config.n_households, config.n_firms
    y = config.stationary_output
    output_per_worker = y / n_hh
    wage = config.base_wage + config.bonus_0 * output_per_worker
    wb = n_hh * wage

    state = {"uc": wb / y}
    for _ in range(100):
        prev = dict(state)
        uc = wb / y
        price = firms.set_price(uc, config.markup)
        gdp = price * y
        bills = config.debt_to_gdp * gdp
        inv_real = config.sigma_inv * y
        inv_nom = inv_real * uc
        loans = inv_nom
        deposits = bills + loans
        reserves, bank_bills, advances = agg.bank_step(
            deposits, loans, config.reserve_ratio, config.advances_ratio)
        cb_bills = agg.central_bank_step(bills, bank_bills)
        spending = agg.government_spending(np.full(n_f, price),
                                           config.g_per_firm)
        c_real = y - config.g_per_firm * n_f
        if c_real <= 0.0:
            raise InitializationError(
                "government purchases exhaust stationary output")
        c_nom = c_real * price
        cb_profits = agg.central_bank_profits(cb_bills, reserves, advances,
                                              config.i_bills)
        if config.tau_g is None:
            taxes = spending + config.i_bills * bills - cb_profits
            tau_g = taxes / wb
        else:
            tau_g = config.tau_g
            taxes = tau_g * wb
        pf = c_nom + spending - wb - config.i_loans * loans
        pb = agg.bank_profits(loans, bank_bills, reserves, deposits,
                              advances, config.i_loans, config.i_bills,
                              config.i_deposits)
        yd = wb + pf + pb + config.i_deposits * deposits - taxes
        if config.alpha_2 is None:
            alpha_2 = (c_nom - config.alpha_1 * yd) / deposits
        else:
            alpha_2 = config.alpha_2
        state = {"uc": uc, "price": price, "bills": bills, "loans": loans,
                 "deposits": deposits, "reserves": reserves,
                 "advances": advances, "taxes": taxes, "yd": yd,
                 "alpha_2": alpha_2}
        if prev.keys() == state.keys() and all(
                abs(state[k] - prev[k]) <= 1e-12 * max(1.0, abs(state[k]))
                for k in state):
            break
    else:
        raise InitializationError("stationary solve did not converge")

    solution = StationaryState(
        output=y, wage=wage, wage_bill=wb, unit_cost=uc, price=price,
        gov_spending=spending, consumption_real=c_real,
        consumption_nominal=c_nom, taxes=taxes, tau_g=tau_g,
        alpha_2=alpha_2, disposable_income=yd, deposits=deposits,
        loans=loans, inventories_real=inv_real, inventories_nominal=inv_nom,
        bills=bills, bank_bills=bank_bills, cb_bills=cb_bills,
        reserves=reserves, advances=advances, firm_profits=pf,
        bank_profits=pb, cb_profits=cb_profits)

    for name, solved in solution.as_reference_dict().items():
        ref = REFERENCE_STATIONARY[name]
        rel = abs(solved - ref) / max(1.0, abs(ref))
        if rel > 1e-6:
            solution.deviations[name] = (solved, ref, rel)

    _verify_stationary(solution, config)
    return solution


def _verify_stationary(s: StationaryState, config: ScenarioConfig) -> None:
    """Run the consistency checker over the solved state's implied step."""
    fm = FlowMatrix()
    fm.record("consumption", "households", -s.consumption_nominal)
    fm.record("consumption", "firms_current", s.consumption_nominal)
    fm.record("govt_expenditure", "government", -s.gov_spending)
    fm.record("govt_expenditure", "firms_current", s.gov_spending)
    fm.record("wages", "firms_current", -s.wage_bill)
    fm.record("wages", "households", s.wage_bill)
    fm.record("taxes", "government", s.taxes)
    fm.record("taxes", "households", -s.taxes)
    ib, il, idep = config.i_bills, config.i_loans, config.i_deposits
    fm.record("interest_bills", "government", -ib * s.bills)
    fm.record("interest_bills", "bank_current", ib * s.bank_bills)
    fm.record("interest_bills", "cb_current", ib * s.cb_bills)
    fm.record("interest_loans", "firms_current", -il * s.loans)
    fm.record("interest_loans", "bank_current", il * s.loans)
    fm.record("interest_reserves", "bank_current", ib * s.reserves)
    fm.record("interest_reserves", "cb_current", -ib * s.reserves)
    fm.record("interest_advances", "bank_current", -ib * s.advances)
    fm.record("interest_advances", "cb_current", ib * s.advances)
    fm.record("interest_deposits", "households", idep * s.deposits)
    fm.record("interest_deposits", "bank_current", -idep * s.deposits)
    fm.record("profits_firms", "firms_current", -s.firm_profits)
    fm.record("profits_firms", "households", s.firm_profits)
    fm.record("profits_bank", "bank_current", -s.bank_profits)
    fm.record("profits_bank", "households", s.bank_profits)
    fm.record("profits_cb", "cb_current", -s.cb_profits)
    fm.record("profits_cb", "government", s.cb_profits)
    d_bills = (s.gov_spending + ib * s.bills - s.taxes - s.cb_profits)
    fm.record("d_bills", "government", d_bills)
    d_dep = s.disposable_income - s.consumption_nominal
    fm.record("d_deposits", "households", -d_dep)
    fm.record("d_deposits", "bank_capital", d_dep)

    bs = BalanceSheet(
        inventories=s.inventories_nominal, loans=s.loans,
        deposits_hh=s.deposits, deposits_bank=s.deposits,
        bills_gov=s.bills, bills_bank=s.bank_bills, bills_cb=s.cb_bills,
        reserves=s.reserves, advances=s.advances,
        nw_firms=s.inventories_nominal - s.loans, nw_households=s.deposits,
        nw_bank=(s.loans + s.reserves + s.bank_bills - s.deposits
                 - s.advances),
        gov_debt=s.bills)
    report = check_consistency(bs, fm, tol_rel=1e-8)
    fixed_tau = config.tau_g is not None
    for scope, name, residual, volume, flagged in report.entries:
        if not flagged:
            continue
        # A pinned tax rate legitimately leaves the budget unbalanced; the
        # deficit shows up as unissued bills and unabsorbed deposits here
        # (the running engine books the full portfolio response each step).
        if fixed_tau and (scope, name) in (("flow_row", "d_bills"),
                                           ("flow_col", "bank_capital")):
            s.deviations["budget_residual"] = (residual, 0.0, abs(residual))
            continue
        raise InitializationError(
            f"solved stationary state violates {scope} '{name}' "
            f"(residual {residual:.3e})")


@dataclass
class Households:
    """Struct-of-arrays over the household population."""

    vtype: np.ndarray
    autonomy: np.ndarray
    reward_ind: np.ndarray
    pi_scale: np.ndarray
    employer: np.ndarray
    employer_prev: np.ndarray
    satisfaction: np.ndarray
    base_sat: np.ndarray
    p_share: np.ndarray
    c_share: np.ndarray
    shirk: np.ndarray
    output: np.ndarray
    wage: np.ndarray
    wage_prev: np.ndarray
    last_wage: np.ndarray
    yd_prev: np.ndarray
    deposits: np.ndarray
    u_spell: np.ndarray
    e_spell: np.ndarray
    warnings_total: np.ndarray
    last_warning_step: np.ndarray
    hired_step: np.ndarray


@dataclass
class Firms:
    """Struct-of-arrays over firms."""

    price: np.ndarray
    uc: np.ndarray
    sales: np.ndarray
    s_exp: np.ndarray
    inv: np.ndarray
    inv_nominal: np.ndarray
    loans: np.ndarray
    y: np.ndarray
    y_plan: np.ndarray
    y_pot: np.ndarray
    wage_bill: np.ndarray
    profits: np.ndarray
    n_demand: np.ndarray
    monitoring: np.ndarray
    reward_mix: np.ndarray
    bonus_rate: np.ndarray
    coop_norm: np.ndarray
    dir_m: np.ndarray
    dir_lam: np.ndarray
    dir_mu: np.ndarray
    q_sum: np.ndarray
    q_count: np.ndarray
    q_prev: np.ndarray


@dataclass
class SectorStocks:
    """Aggregate-sector stocks and the flow-accumulated net worths."""

    bills: float
    bank_bills: float
    cb_bills: float
    reserves: float
    advances: float
    deposits: float
    nw_firms: float
    nw_households: float
    nw_bank: float
    gov_debt: float


@dataclass
class EconomyState:
    """Everything one replicate carries between steps."""

    config: ScenarioConfig
    t: int
    hh: Households
    fm: Firms
    ag: SectorStocks
    tau_g: float
    alpha_2: float
    adjacency: np.ndarray            # boolean friendship matrix
    adjacency_f: np.ndarray          # float32 copy for fast matvecs
    intensity: np.ndarray            # float32 pairwise interaction
    events: EventLog
    rng: np.random.Generator
    scheme: BenefitScheme
    stationary: StationaryState
    last_report: ConsistencyReport | None = None
    last_totals: dict = field(default_factory=dict)
    fires_step: int = 0
    quits_step: int = 0

    def rosters(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.hh.employer == f)
                for f in range(self.config.n_firms)]

    def digest(self) -> str:
        """SHA-256 over every state array, for bit-identity comparisons."""
        h = hashlib.sha256()
        for obj in (self.hh, self.fm):
            for name in vars(obj):
                h.update(np.ascontiguousarray(getattr(obj, name)).tobytes())
        for name, value in vars(self.ag).items():
            h.update(f"{name}={value!r}".encode())
        h.update(self.intensity.tobytes())
        h.update(repr(self.events.events).encode())
        return h.hexdigest()


def replicate_seed(master_seed: int, replicate: int) -> int:
    """Independent stream per replicate, derived by XOR."""
    return master_seed ^ replicate


def init_stationary_state(config: ScenarioConfig,
                          rng: np.random.Generator | None = None
                          ) -> EconomyState:
    """Build the full agent population at the solved stationary state.

    Workers start employed in type-balanced rosters, satisfaction at its
    base level, time shares and cooperation norms at their joint fixed
    point, and each worker's productivity scale calibrated so stationary
    per-worker output matches the solved aggregate. Pair interaction
    intensities start at their long-run values so the whole state is a
    fixed point of the step map (absent warnings, adaptation and quits).
    """
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.master_seed)
    sol = solve_stationary(config)
    n_hh, n_f = config.n_households, config.n_firms
    per_firm = n_hh // n_f

    vtype, autonomy, reward_ind = behavior.draw_value_profiles(n_hh, rng)
    adjacency = behavior.build_friendship_network(
        vtype, config.homophily_same(), config.homophily_cross,
        config.mean_degree, rng)

    employer = (np.arange(n_hh) % n_f).astype(np.int32)
    base_sat = behavior.base_satisfaction(
        autonomy, reward_ind, config.monitoring_0, config.pfp_0)
    if np.any(base_sat <= 1e-9):
        raise InitializationError(
            "initial strategy leaves some workers with zero base "
            "satisfaction; productivity cannot be calibrated")

    o_target = sol.output / n_hh
    p_share = np.empty(n_hh)
    c_share = np.empty(n_hh)
    shirk = np.empty(n_hh)
    coop_norm = np.empty(n_f)
    for f in range(n_f):
        roster = np.flatnonzero(employer == f)
        s0 = base_sat[roster]
        shirk0 = behavior.shirk_level(
            s0, s0, config.monitoring_0, config.shirk_max,
            config.shirk_deterrence)
        coop_norm[f] = behavior.solve_cooperation_norm(
            config.pfp_0, float(1.0 - shirk0.mean()))
        p_f, c_f, sh_f = behavior.allocate_time(
            s0, config.pfp_0, coop_norm[f], config.shirk_max,
            config.monitoring_0, config.shirk_deterrence, s0)
        p_share[roster], c_share[roster], shirk[roster] = p_f, c_f, sh_f

    pi_scale = np.empty(n_hh)
    for f in range(n_f):
        roster = np.flatnonzero(employer == f)
        c_bar = float(c_share[roster].mean())
        effort = behavior.individual_output(
            np.ones(len(roster)), p_share[roster], c_bar, config.kappa)
        if np.any(effort * base_sat[roster] <= 1e-12):
            raise InitializationError(
                "initial strategy yields zero effective effort; "
                "productivity cannot be calibrated")
        pi_scale[roster] = (o_target * (1.0 + config.capacity_headroom)
                            / (base_sat[roster] * effort))

    intensity = np.zeros((n_hh, n_hh), dtype=np.float32)
    for f in range(n_f):
        roster = np.flatnonzero(employer == f)
        block = np.minimum.outer(c_share[roster], c_share[roster])
        np.fill_diagonal(block, 0.0)
        intensity[np.ix_(roster, roster)] = block

    hh = Households(
        vtype=vtype, autonomy=autonomy, reward_ind=reward_ind,
        pi_scale=pi_scale, employer=employer, employer_prev=employer.copy(),
        satisfaction=base_sat.copy(), base_sat=base_sat,
        p_share=p_share, c_share=c_share, shirk=shirk,
        output=np.full(n_hh, o_target * (1.0 + config.capacity_headroom)),
        wage=np.full(n_hh, sol.wage),
        wage_prev=np.full(n_hh, sol.wage),
        last_wage=np.full(n_hh, sol.wage),
        yd_prev=np.full(n_hh, sol.disposable_income / n_hh),
        deposits=np.full(n_hh, sol.deposits / n_hh),
        u_spell=np.zeros(n_hh, dtype=np.int32),
        e_spell=np.zeros(n_hh, dtype=np.int32),
        warnings_total=np.zeros(n_hh, dtype=np.int32),
        last_warning_step=np.full(n_hh, -10, dtype=np.int32),
        hired_step=np.zeros(n_hh, dtype=np.int32))

    y_i = sol.output / n_f
    fm = Firms(
        price=np.full(n_f, sol.price), uc=np.full(n_f, sol.unit_cost),
        sales=np.full(n_f, y_i), s_exp=np.full(n_f, y_i),
        inv=np.full(n_f, sol.inventories_real / n_f),
        inv_nominal=np.full(n_f, sol.inventories_nominal / n_f),
        loans=np.full(n_f, sol.loans / n_f), y=np.full(n_f, y_i),
        y_plan=np.full(n_f, y_i),
        y_pot=np.full(n_f, y_i * (1.0 + config.capacity_headroom)),
        wage_bill=np.full(n_f, sol.wage_bill / n_f),
        profits=np.full(n_f, sol.firm_profits / n_f),
        n_demand=np.full(n_f, per_firm, dtype=np.int32),
        monitoring=np.full(n_f, config.monitoring_0),
        reward_mix=np.full(n_f, config.pfp_0),
        bonus_rate=np.full(n_f, config.bonus_0),
        coop_norm=coop_norm,
        dir_m=rng.choice([-1, 1], n_f).astype(np.int8),
        dir_lam=rng.choice([-1, 1], n_f).astype(np.int8),
        dir_mu=rng.choice([-1, 1], n_f).astype(np.int8),
        q_sum=np.zeros(n_f), q_count=np.zeros(n_f, dtype=np.int32),
        q_prev=np.zeros(n_f))  # first review always explores

    ag = SectorStocks(
        bills=sol.bills, bank_bills=sol.bank_bills, cb_bills=sol.cb_bills,
        reserves=sol.reserves, advances=sol.advances, deposits=sol.deposits,
        nw_firms=sol.inventories_nominal - sol.loans,
        nw_households=sol.deposits,
        nw_bank=(sol.loans + sol.reserves + sol.bank_bills - sol.deposits
                 - sol.advances),
        gov_debt=sol.bills)

    scheme = BenefitScheme(replacement_rate=config.delta_g,
                           max_duration=config.epsilon,
                           expiry_mode=config.expiry_mode)
    return EconomyState(config=config, t=0, hh=hh, fm=fm, ag=ag,
                        tau_g=sol.tau_g, alpha_2=sol.alpha_2,
                        adjacency=adjacency,
                        adjacency_f=adjacency.astype(np.float32),
                        intensity=intensity, events=EventLog(), rng=rng,
                        scheme=scheme, stationary=sol)


def _phase_plan(state: EconomyState) -> None:
    cfg, fm, hh = state.config, state.fm, state.hh
    employed = hh.employer >= 0
    fallback = float(hh.output[employed].mean()) if employed.any() else 0.0
    for f in range(cfg.n_firms):
        fm.price[f] = firms.set_price(fm.uc[f], cfg.markup)
        fm.s_exp[f] = firms.expected_sales(
            fm.sales[f], fm.s_exp[f], cfg.beta_exp, cfg.expectation_mode)
        _, _, y_plan = firms.plan_output(
            fm.s_exp[f], fm.inv[f], cfg.sigma_inv, cfg.lambda_exp)
        fm.y_plan[f] = y_plan
        roster = np.flatnonzero(hh.employer == f)
        mean_out = float(hh.output[roster].mean()) if len(roster) else 0.0
        fm.n_demand[f] = firms.labour_demand(
            y_plan, mean_out, len(roster), fallback)


def _ebar_by_firm(state: EconomyState):
    """Mean co-worker interaction intensity, for every employed household.

    One matmul against firm-indicator columns replaces per-firm block
    extraction. Returns (ebar, mean over the other roster members, roster
    sizes by firm); both arrays are zero for the unemployed and for
    single-worker rosters.
    """
    cfg, hh = state.config, state.hh
    n_hh, n_f = cfg.n_households, cfg.n_firms
    indicator = np.zeros((n_hh, n_f), dtype=np.float32)
    employed = hh.employer >= 0
    indicator[employed, hh.employer[employed]] = 1.0
    sums = state.intensity @ indicator          # intensity to each roster
    counts = indicator.sum(axis=0).astype(int)
    ebar = np.zeros(n_hh)
    mean_others = np.zeros(n_hh)
    idx = np.flatnonzero(employed)
    f_of = hh.employer[idx]
    size = counts[f_of]
    multi = size > 1
    idx, f_of, size = idx[multi], f_of[multi], size[multi]
    own = sums[idx, f_of].astype(float) / (size - 1)
    ebar[idx] = own
    roster_totals = np.zeros(n_f)
    np.add.at(roster_totals, f_of, own)
    mean_others[idx] = (roster_totals[f_of] - own) / (size - 1)
    return ebar, mean_others, counts


def _start_contract(hh: Households, hired: np.ndarray, firm: int,
                    t: int) -> None:
    """A new employment contract: clean warning record, fresh spell."""
    hh.employer[hired] = firm
    hh.u_spell[hired] = 0
    hh.hired_step[hired] = t
    hh.warnings_total[hired] = 0
    hh.last_warning_step[hired] = -10


def _phase_match(state: EconomyState, t: int) -> None:
    cfg, fm, hh = state.config, state.fm, state.hh
    n_prev = np.bincount(hh.employer_prev[hh.employer_prev >= 0],
                         minlength=cfg.n_firms)
    ebar_all = None

    for f in range(cfg.n_firms):
        n_fire = int(n_prev[f]) - int(fm.n_demand[f])
        if n_fire <= 0:
            continue
        if ebar_all is None:
            ebar_all, _, _ = _ebar_by_firm(state)
        roster = np.flatnonzero(hh.employer == f)
        eligible = labour_market.fire_candidates(
            roster, hh.warnings_total, hh.last_warning_step, t,
            ebar_all[roster], cfg.fire_rule)
        victims = eligible[:n_fire]
        if len(victims):
            hh.employer[victims] = UNEMPLOYED
            hh.e_spell[victims] = 0
            hh.c_share[victims] = 0.0
            state.events.events.extend(
                (t, labour_market.FIRE, int(v), f) for v in victims)
            state.fires_step += len(victims)

    referral_hired = np.zeros(cfg.n_firms, dtype=int)
    for f in range(cfg.n_firms):
        n_hire = int(fm.n_demand[f]) - int(n_prev[f])
        if n_hire <= 0:
            continue
        unemployed = hh.employer == UNEMPLOYED
        roster = np.flatnonzero(hh.employer == f)
        candidates = labour_market.referral_candidates(
            unemployed, hh.employer_prev == f, state.adjacency, roster,
            hh.warnings_total, hh.last_warning_step, t)
        hired = labour_market.select_hires(candidates, n_hire, hh.u_spell)
        if len(hired):
            _start_contract(hh, hired, f, t)
            state.events.events.extend(
                (t, labour_market.HIRE, int(w), f) for w in hired)
        referral_hired[f] = len(hired)

    expired_clock = (np.full(cfg.n_households, t >= state.scheme.max_duration)
                     if state.scheme.expiry_mode == "calendar"
                     else hh.u_spell >= state.scheme.max_duration)
    for f in range(cfg.n_firms):
        vacancies = int(fm.n_demand[f]) - int(n_prev[f]) - referral_hired[f]
        if vacancies <= 0:
            continue
        signalling = expired_clock & (hh.employer == UNEMPLOYED)
        hired = labour_market.select_hires(
            np.flatnonzero(signalling), vacancies, hh.u_spell)
        if len(hired):
            _start_contract(hh, hired, f, t)
            state.events.events.extend(
                (t, labour_market.SIGNAL_HIRE, int(w), f) for w in hired)


def _phase_produce(state: EconomyState, t: int) -> None:
    cfg, fm, hh = state.config, state.fm, state.hh
    n_f = cfg.n_firms
    emp_idx = np.flatnonzero(hh.employer >= 0)
    e = hh.employer[emp_idx]
    counts = np.bincount(e, minlength=n_f)
    nz = np.maximum(counts, 1)

    fm.coop_norm = np.where(
        counts > 0,
        np.bincount(e, weights=hh.c_share[emp_idx], minlength=n_f) / nz,
        0.0)

    just = emp_idx[hh.hired_step[emp_idx] == t]
    if len(just):
        jf = hh.employer[just]
        hh.base_sat[just] = behavior.base_satisfaction(
            hh.autonomy[just], hh.reward_ind[just],
            fm.monitoring[jf], fm.reward_mix[jf])
        # A new match starts at its long-run fit level.
        hh.satisfaction[just] = hh.base_sat[just]

    sat = behavior.relax_satisfaction(
        hh.satisfaction[emp_idx], hh.base_sat[emp_idx],
        cfg.rho_satisfaction)
    lam_h = fm.reward_mix[e]
    p, c, shirk = behavior.allocate_time(
        sat, lam_h, fm.coop_norm[e], cfg.shirk_max,
        fm.monitoring[e], cfg.shirk_deterrence, hh.base_sat[emp_idx])
    if cfg.warning_compliance_steps > 0:
        # Workers caught recently keep their heads down for a while.
        chastened = (t - hh.last_warning_step[emp_idx]
                     <= cfg.warning_compliance_steps)
        if chastened.any():
            freed = np.where(chastened, shirk, 0.0)
            shirk = shirk - freed
            coop_w = 0.5 * (lam_h + fm.coop_norm[e])
            c = c + freed * coop_w
            p = p + freed * (1.0 - coop_w)
    c_bar = np.where(counts > 0,
                     np.bincount(e, weights=c, minlength=n_f) / nz, 0.0)
    out = behavior.individual_output(
        hh.pi_scale[emp_idx] * sat, p, c_bar[e], cfg.kappa)
    fm.y_pot = np.bincount(e, weights=out, minlength=n_f)
    fm.y = np.minimum(fm.y_plan, fm.y_pot)
    mean_out = np.where(counts > 0, fm.y_pot / nz, 0.0)

    pay = (cfg.base_wage + fm.bonus_rate[e]
           * ((1.0 - lam_h) * out + lam_h * mean_out[e]))
    fm.wage_bill = np.bincount(e, weights=pay, minlength=n_f)
    fm.uc = np.where(fm.y > 0.0, fm.wage_bill / np.where(fm.y > 0, fm.y, 1.0),
                     fm.uc)

    if cfg.enable_monitoring and len(emp_idx):
        draws = state.rng.random(len(emp_idx))
        warned = (shirk > cfg.shirk_tolerance) & (draws < fm.monitoring[e])
        if warned.any():
            caught = emp_idx[warned]
            hh.warnings_total[caught] += 1
            hh.last_warning_step[caught] = t
            sat = np.where(warned,
                           np.maximum(0.0, sat - cfg.warning_penalty), sat)

    hh.satisfaction[emp_idx] = sat
    hh.p_share[emp_idx] = p
    hh.c_share[emp_idx] = c
    hh.shirk[emp_idx] = shirk
    hh.output[emp_idx] = out
    wage = np.zeros(cfg.n_households)
    wage[emp_idx] = pay
    hh.wage = wage
    hh.last_wage[emp_idx] = pay

    fm.q_sum += np.where(counts > 0, fm.y / nz, 0.0)
    fm.q_count += counts > 0

    rosters = [emp_idx[e == f] for f in range(n_f)]
    behavior.update_interaction_intensity(
        state.intensity, rosters, hh.c_share, cfg.rho_interaction)

    if cfg.enable_adaptation:
        stagger = max(cfg.strategy_review_period // n_f, 1)
        for f in range(n_f):
            # Reviews are staggered across firms so strategy moves never
            # shock the whole labour market in the same step.
            if (t + f * stagger) % cfg.strategy_review_period != 0:
                continue
            if fm.q_count[f] == 0:
                continue
            quality = fm.q_sum[f] / fm.q_count[f]
            band = cfg.strategy_deadband * max(abs(fm.q_prev[f]), 1e-12)
            if quality > fm.q_prev[f] + band:
                move = True            # keep climbing the same way
            elif quality < fm.q_prev[f] - band:
                move = True            # reverse course
                fm.dir_m[f] = -fm.dir_m[f]
                fm.dir_lam[f] = -fm.dir_lam[f]
                fm.dir_mu[f] = -fm.dir_mu[f]
            else:
                move = False           # no clear signal: keep the strategy
            old = (fm.monitoring[f], fm.reward_mix[f])
            if move:
                fm.monitoring[f] = behavior.hill_climb(
                    fm.monitoring[f], fm.dir_m[f], cfg.strategy_step,
                    0.0, 1.0)
                fm.reward_mix[f] = behavior.hill_climb(
                    fm.reward_mix[f], fm.dir_lam[f], cfg.strategy_step,
                    0.0, 1.0)
                if cfg.adapt_bonus:
                    fm.bonus_rate[f] = behavior.hill_climb(
                        fm.bonus_rate[f], fm.dir_mu[f], cfg.strategy_step,
                        0.0, cfg.bonus_max)
            fm.q_prev[f] = quality
            fm.q_sum[f] = 0.0
            fm.q_count[f] = 0
            if (fm.monitoring[f], fm.reward_mix[f]) != old:
                roster = rosters[f]
                if len(roster):
                    hh.base_sat[roster] = behavior.base_satisfaction(
                        hh.autonomy[roster], hh.reward_ind[roster],
                        fm.monitoring[f], fm.reward_mix[f])


def _phase_goods(state: EconomyState, t: int):
    cfg, fm, hh = state.config, state.fm, state.hh
    n_hh, n_f = cfg.n_households, cfg.n_firms

    employed = hh.employer >= 0
    median_wage = float(np.median(hh.wage[employed])) if employed.any() else 0.0
    ub = np.zeros(n_hh)
    jobless = np.flatnonzero(~employed)
    if len(jobless):
        ub[jobless] = labour_market.benefits_vector(
            jobless, hh.last_wage, hh.u_spell, median_wage, t, state.scheme)

    taxes = agg.household_taxes(hh.wage_prev, state.tau_g)

    if cfg.matching == "balanced":
        perm = state.rng.permutation(n_hh)
        matched = np.empty(n_hh, dtype=np.int64)
        matched[perm] = np.arange(n_hh) % n_f
    else:
        matched = state.rng.integers(0, n_f, n_hh)

    demand = agg.consumption_demand(
        hh.yd_prev, hh.deposits, fm.price[matched], cfg.alpha_1,
        state.alpha_2)
    afford = hh.deposits + np.maximum(hh.wage + ub - taxes, 0.0)
    demand = np.minimum(demand, afford / fm.price[matched])

    c_real = np.zeros(n_hh)
    gov_real = np.zeros(n_f)
    consumption_recv = np.zeros(n_f)
    for f in range(n_f):
        idx = np.flatnonzero(matched == f)
        supply = fm.y[f] + fm.inv[f]
        rationed, gov_real[f] = firms.ration_consumers(
            demand[idx], cfg.g_per_firm, supply)
        c_real[idx] = rationed
        consumption_recv[f] = rationed.sum() * fm.price[f]
        fm.sales[f] = float(rationed.sum()) + gov_real[f]

    c_nominal = c_real * fm.price[matched]
    return ub, taxes, c_real, c_nominal, gov_real, consumption_recv


def _phase_settle(state: EconomyState, ub, taxes, c_nominal, gov_real,
                  consumption_recv):
    cfg, fm, hh, ag = state.config, state.fm, state.hh, state.ag
    loans_prev = fm.loans.copy()
    d_inv = np.empty(cfg.n_firms)
    gov_nominal = gov_real * fm.price
    for f in range(cfg.n_firms):
        fm.inv[f], fm.inv_nominal[f], d_inv[f], fm.loans[f], fm.profits[f] = \
            firms.settle(fm.sales[f], fm.y[f], fm.inv[f], fm.uc[f],
                         loans_prev[f], consumption_recv[f], gov_nominal[f],
                         fm.wage_bill[f], cfg.i_loans, fm.inv_nominal[f])

    pb = agg.bank_profits(
        float(loans_prev.sum()), ag.bank_bills, ag.reserves, ag.deposits,
        ag.advances, cfg.i_loans, cfg.i_bills, cfg.i_deposits)
    pf_total = float(fm.profits.sum())
    share = (pf_total + pb) / cfg.n_households
    yd = agg.disposable_income(hh.wage, ub, share, hh.deposits,
                               cfg.i_deposits, taxes)
    hh.deposits = hh.deposits + yd - c_nominal
    hh.yd_prev = yd
    return pb, pf_total, yd, float(loans_prev.sum()), float(d_inv.sum()), \
        float(gov_nominal.sum())


def _phase_bills(state: EconomyState, ub_total, tax_total, gov_total):
    cfg, ag = state.config, state.ag
    prev = (ag.bills, ag.bank_bills, ag.cb_bills, ag.reserves, ag.advances,
            ag.deposits)
    pcb = agg.central_bank_profits(ag.cb_bills, ag.reserves, ag.advances,
                                   cfg.i_bills)
    deposits = float(state.hh.deposits.sum())
    loans = float(state.fm.loans.sum())
    ag.bills = agg.government_bills(ag.bills, gov_total, ub_total,
                                    tax_total, pcb, cfg.i_bills)
    ag.reserves, ag.bank_bills, ag.advances = agg.bank_step(
        deposits, loans, cfg.reserve_ratio, cfg.advances_ratio)
    ag.cb_bills = agg.central_bank_step(ag.bills, ag.bank_bills)
    ag.deposits = deposits
    return pcb, prev


def _phase_quits(state: EconomyState, t: int) -> None:
    cfg, hh = state.config, state.hh
    ebar, mean_others, _ = _ebar_by_firm(state)

    quitters = labour_market.quit_mask(
        hh.employer, hh.employer_prev, hh.wage, hh.wage_prev,
        hh.satisfaction, state.adjacency_f, ebar, mean_others,
        cfg.quit_wage_drop)
    leavers = np.flatnonzero(quitters)
    if len(leavers):
        state.events.events.extend(
            (t, labour_market.QUIT, int(w), int(hh.employer[w]))
            for w in leavers)
        hh.employer[leavers] = UNEMPLOYED
        hh.e_spell[leavers] = 0
        hh.c_share[leavers] = 0.0
        state.quits_step += len(leavers)


def _book_and_check(state: EconomyState, t: int, totals: dict) -> None:
    cfg, ag = state.config, state.ag
    ib, il, idep = cfg.i_bills, cfg.i_loans, cfg.i_deposits
    (bills_p, bank_bills_p, cb_bills_p, reserves_p, advances_p,
     deposits_p) = totals["prev_stocks"]
    loans_prev = totals["loans_prev"]

    flow = FlowMatrix()
    flow.record("consumption", "households", -totals["consumption"])
    flow.record("consumption", "firms_current", totals["consumption"])
    flow.record("govt_expenditure", "government", -totals["gov"])
    flow.record("govt_expenditure", "firms_current", totals["gov"])
    flow.record("inventory_change", "firms_current", totals["d_inv"])
    flow.record("inventory_change", "firms_capital", -totals["d_inv"])
    flow.record("wages", "firms_current", -totals["wages"])
    flow.record("wages", "households", totals["wages"])
    flow.record("taxes", "government", totals["taxes"])
    flow.record("taxes", "households", -totals["taxes"])
    flow.record("unemployment_benefits", "government", -totals["benefits"])
    flow.record("unemployment_benefits", "households", totals["benefits"])
    flow.record("interest_bills", "government", -ib * bills_p)
    flow.record("interest_bills", "bank_current", ib * bank_bills_p)
    flow.record("interest_bills", "cb_current", ib * cb_bills_p)
    flow.record("interest_loans", "firms_current", -il * loans_prev)
    flow.record("interest_loans", "bank_current", il * loans_prev)
    flow.record("interest_reserves", "bank_current", ib * reserves_p)
    flow.record("interest_reserves", "cb_current", -ib * reserves_p)
    flow.record("interest_advances", "bank_current", -ib * advances_p)
    flow.record("interest_advances", "cb_current", ib * advances_p)
    flow.record("interest_deposits", "households", idep * deposits_p)
    flow.record("interest_deposits", "bank_current", -idep * deposits_p)
    flow.record("profits_firms", "firms_current", -totals["pf"])
    flow.record("profits_firms", "households", totals["pf"])
    flow.record("profits_bank", "bank_current", -totals["pb"])
    flow.record("profits_bank", "households", totals["pb"])
    flow.record("profits_cb", "cb_current", -totals["pcb"])
    flow.record("profits_cb", "government", totals["pcb"])

    d_bills = ag.bills - bills_p
    d_bank_bills = ag.bank_bills - bank_bills_p
    d_cb_bills = ag.cb_bills - cb_bills_p
    d_loans = float(state.fm.loans.sum()) - loans_prev
    d_deposits = ag.deposits - deposits_p
    d_reserves = ag.reserves - reserves_p
    d_advances = ag.advances - advances_p
    flow.record("d_bills", "government", d_bills)
    flow.record("d_bills", "bank_capital", -d_bank_bills)
    flow.record("d_bills", "cb_capital", -d_cb_bills)
    flow.record("d_loans", "firms_capital", d_loans)
    flow.record("d_loans", "bank_capital", -d_loans)
    flow.record("d_deposits", "households", -d_deposits)
    flow.record("d_deposits", "bank_capital", d_deposits)
    flow.record("d_hpm", "bank_capital", -d_reserves)
    flow.record("d_hpm", "cb_capital", d_reserves)
    flow.record("d_advances", "bank_capital", d_advances)
    flow.record("d_advances", "cb_capital", -d_advances)

    ag.nw_firms += totals["d_inv"] - d_loans
    ag.nw_households += totals["yd"] - totals["consumption"]
    ag.gov_debt += d_bills

    bs = BalanceSheet(
        inventories=float(state.fm.inv_nominal.sum()),
        loans=float(state.fm.loans.sum()),
        deposits_hh=float(state.hh.deposits.sum()),
        deposits_bank=ag.deposits, bills_gov=ag.bills,
        bills_bank=ag.bank_bills, bills_cb=ag.cb_bills,
        reserves=ag.reserves, advances=ag.advances,
        nw_firms=ag.nw_firms, nw_households=ag.nw_households,
        nw_bank=ag.nw_bank, gov_debt=ag.gov_debt)

    report = check_consistency(bs, flow, cfg.sfc_tolerance, step=t)
    state.last_report = report
    if not report.ok and cfg.sfc_strict:
        raise SFCViolationError(t, report)


def step(state: EconomyState) -> EconomyState:
    """Advance the economy one period through all seven phases."""
    cfg, hh = state.config, state.hh
    t = state.t + 1
    state.fires_step = 0
    state.quits_step = 0
    hh.employer_prev = hh.employer.copy()
    hh.wage_prev = hh.wage.copy()

    _phase_plan(state)
    _phase_match(state, t)
    _phase_produce(state, t)
    ub, taxes, c_real, c_nominal, gov_real, consumption_recv = \
        _phase_goods(state, t)
    pb, pf_total, yd, loans_prev, d_inv_total, gov_total = _phase_settle(
        state, ub, taxes, c_nominal, gov_real, consumption_recv)
    ub_total = float(ub.sum())
    tax_total = float(taxes.sum())
    pcb, prev_stocks = _phase_bills(state, ub_total, tax_total, gov_total)
    if cfg.enable_quits:
        _phase_quits(state, t)

    unemployed = state.hh.employer < 0
    labour_market.update_spells(unemployed, hh.u_spell, hh.e_spell)

    totals = {
        "consumption": float(c_nominal.sum()), "gov": gov_total,
        "d_inv": d_inv_total, "wages": float(state.fm.wage_bill.sum()),
        "taxes": tax_total, "benefits": ub_total, "pf": pf_total,
        "pb": pb, "pcb": pcb, "yd": float(yd.sum()),
        "loans_prev": loans_prev, "prev_stocks": prev_stocks,
        "consumption_real": float(c_real.sum()),
    }
    _book_and_check(state, t, totals)
    state.t = t
    state.last_totals = totals
    return state


def run_replicate(config: ScenarioConfig, replicate: int,
                  collect_reports: bool = False):
    """Run one replicate; returns (metrics array, event log, final digest)
    or, with ``collect_reports``, a fourth element holding every step's
    consistency report."""
    from .analysis import N_METRICS, compute_step_metrics

    rng = np.random.default_rng(replicate_seed(config.master_seed, replicate))
    state = init_stationary_state(config, rng)
    frame = np.empty((config.steps, N_METRICS))
    reports = []
    for i in range(config.steps):
        step(state)
        frame[i] = compute_step_metrics(state)
        if collect_reports:
            reports.append(state.last_report)
    if collect_reports:
        return frame, state.events, state.digest(), reports
    return frame, state.events, state.digest()


def run_scenario(config: ScenarioConfig, jobs: int = 1):
    """Run all replicates of one scenario; frames in replicate order."""
    indices = list(range(config.replicates))
    if jobs > 1 and config.replicates > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_replicate_star,
                                    [(config, r) for r in indices]))
    else:
        results = [run_replicate(config, r) for r in indices]
    return results


def _run_replicate_star(args):
    return run_replicate(*args)
