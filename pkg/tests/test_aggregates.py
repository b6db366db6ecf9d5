"""Government, bank, central-bank and household financial behaviour."""

import numpy as np
import pytest

from dolenet import aggregates as agg


class TestGovernment:
    def test_spending_at_initial_prices(self):
        g = agg.government_spending(np.full(5, 10.021698), 20.0)
        assert g == pytest.approx(1002.1698)

    def test_bills_constant_at_balanced_budget(self):
        b = agg.government_bills(
            bills_prev=502.9087653, spending=1002.1698,
            benefits=0.0, taxes=1002.1698 + 0.004 * 502.9087653,
            cb_profits=0.0, i_bills=0.004)
        assert b == pytest.approx(502.9087653, abs=1e-6)

    def test_deficit_issues_bills(self):
        b = agg.government_bills(100.0, 50.0, 10.0, 40.0, 0.0, 0.0)
        assert b == pytest.approx(120.0)


class TestBank:
    RR = 0.35
    VR = 1073.109302 / 4502.908765

    def test_initial_portfolio(self):
        h, bb, a = agg.bank_step(4502.908765, 4000.0, self.RR, self.VR)
        assert h == pytest.approx(1576.018, abs=1e-3)
        assert bb == 0.0
        assert a == pytest.approx(1073.109, abs=1e-3)

    def test_all_zero(self):
        assert agg.bank_step(0.0, 0.0, self.RR, self.VR) == (0.0, 0.0, 0.0)

    def test_branch_switch_with_surplus_funds(self):
        # deposits far above loans push the bank into bill purchases with
        # structural advances
        h, bb, a = agg.bank_step(10_000.0, 1_000.0, self.RR, self.VR)
        assert bb > 0.0
        assert a == pytest.approx(self.VR * 10_000.0)

    def test_balance_closes_in_both_branches(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            d = rng.random() * 10_000
            loans = rng.random() * 8_000
            h, bb, a = agg.bank_step(d, loans, self.RR, self.VR)
            assert loans + h + bb == pytest.approx(d + a, abs=1e-9)
            assert bb >= 0.0

    def test_branches_agree_at_the_boundary(self):
        # deposits exactly at the point where bill demand vanishes
        d = 4502.908765
        h0, bb0, a0 = agg.bank_step(d, 4000.0, self.RR, self.VR)
        h1, bb1, a1 = agg.bank_step(d + 1e-7, 4000.0, self.RR, self.VR)
        assert a1 == pytest.approx(a0, abs=1e-6)

    def test_profits_at_initial_stocks(self):
        pb = agg.bank_profits(4000.0, 0.0, 1576.018067, 4502.908765,
                              1073.109302, 0.005, 0.004, 0.003)
        assert pb == pytest.approx(8.5029087, abs=1e-6)


class TestCentralBank:
    def test_clears_the_bills_market(self):
        assert agg.central_bank_step(502.909, 0.0) == pytest.approx(502.909)

    def test_negative_holdings_are_structural_errors(self):
        with pytest.raises(RuntimeError):
            agg.central_bank_step(100.0, 150.0)

    def test_profits_vanish_at_initial_stocks(self):
        pcb = agg.central_bank_profits(502.9087653, 1576.018067,
                                       1073.109302, 0.004)
        assert pcb == pytest.approx(0.0, abs=1e-6)

    def test_profits_zero_at_zero_rate(self):
        assert agg.central_bank_profits(100.0, 50.0, 20.0, 0.0) == 0.0


class TestHouseholds:
    def test_consumption_is_zero_without_resources(self):
        c = agg.consumption_demand(np.zeros(3), np.zeros(3),
                                   np.full(3, 10.0), 0.8, 0.2)
        assert not c.any()

    def test_stationary_propensities(self):
        # with the income propensity at 0.8, the deposit propensity that
        # keeps consumption equal to income is about 0.2042
        yd, dh = 4597.830153, 4502.908765
        alpha_2 = (1.0 - 0.8) * yd / dh
        assert alpha_2 == pytest.approx(0.2042, abs=1e-4)
        c = agg.consumption_demand(np.array([yd]), np.array([dh]),
                                   np.array([10.021698]), 0.8, alpha_2)
        assert c[0] * 10.021698 == pytest.approx(yd, rel=1e-9)

    def test_tax_on_previous_wage(self):
        tax = agg.household_taxes(np.full(500, 8.0), 0.18)
        assert tax[0] == pytest.approx(1.44)
        assert tax.sum() == pytest.approx(720.0)

    def test_disposable_income_composition(self):
        yd = agg.disposable_income(
            wages=np.array([8.0]), benefits=np.array([0.0]),
            profit_share=3.177, deposits_prev=np.array([9.0]),
            i_deposits=0.003, taxes=np.array([1.44]))
        assert yd[0] == pytest.approx(8.0 + 3.177 + 0.027 - 1.44)
