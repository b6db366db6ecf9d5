"""Worker kernel: value profiles, the friendship network, time allocation,
output, rewards, warnings and interaction intensities."""

import numpy as np
import pytest

from dolenet import behavior
from dolenet.behavior import (TYPE_C, TYPE_O, TYPE_SE, TYPE_ST,
                              ManagementStrategy, allocate_time,
                              base_satisfaction, build_friendship_network,
                              draw_value_profiles, individual_output,
                              mean_intensity, monitor_and_warn, reward,
                              update_interaction_intensity)
from dolenet.params import ConfigError

DEFAULT_SAME = (3.0, 0.5, 0.5, 3.0)


class TestValueProfiles:
    def test_pinned_axes(self):
        vtype, autonomy, reward_ind = draw_value_profiles(
            400, np.random.default_rng(1))
        assert (autonomy[vtype == TYPE_O] == 1.0).all()
        assert (autonomy[vtype == TYPE_C] == 0.0).all()
        assert (reward_ind[vtype == TYPE_SE] == 1.0).all()
        assert (reward_ind[vtype == TYPE_ST] == 0.0).all()

    def test_uniform_quarters(self):
        vtype, _, _ = draw_value_profiles(500, np.random.default_rng(2))
        assert np.bincount(vtype, minlength=4).tolist() == [125, 125, 125, 125]

    def test_types_interleave_across_ids(self):
        # consecutive ids cycle through all four types, so round-robin
        # dealing produces type-balanced rosters
        vtype, _, _ = draw_value_profiles(40, np.random.default_rng(3))
        for block in vtype.reshape(10, 4):
            assert sorted(block.tolist()) == [0, 1, 2, 3]


class TestFriendshipNetwork:
    def test_mean_degree_across_seeds(self):
        # Monte-Carlo check of the expected-degree scaling
        degrees = []
        for seed in range(100):
            rng = np.random.default_rng(seed)
            vtype, _, _ = draw_value_profiles(500, rng)
            adj = build_friendship_network(vtype, (1.5, 0.5, 0.5, 1.5),
                                           1.0, 5.0, rng)
            degrees.append(adj.sum() / 500)
        assert 4.0 <= np.mean(degrees) <= 6.0

    def test_equal_weights_give_type_share_mixing(self):
        # with all-equal weights the same-type edge fraction approaches
        # the sum of squared type shares (0.25 for uniform quarters)
        same_frac = []
        for seed in range(30):
            rng = np.random.default_rng(seed)
            vtype, _, _ = draw_value_profiles(500, rng)
            adj = build_friendship_network(vtype, (0.99999,) * 4, 1.0,
                                           8.0, rng)
            i, j = np.nonzero(np.triu(adj, k=1))
            same_frac.append((vtype[i] == vtype[j]).mean())
        assert np.mean(same_frac) == pytest.approx(0.25, abs=0.02)

    def test_zero_degree_gives_empty_network(self):
        rng = np.random.default_rng(0)
        vtype, _, _ = draw_value_profiles(100, rng)
        adj = build_friendship_network(vtype, DEFAULT_SAME, 1.0, 0.0, rng)
        assert not adj.any()

    def test_symmetric_irreflexive(self):
        rng = np.random.default_rng(5)
        vtype, _, _ = draw_value_profiles(200, rng)
        adj = build_friendship_network(vtype, DEFAULT_SAME, 1.0, 6.0, rng)
        assert (adj == adj.T).all()
        assert not adj.diagonal().any()

    def test_se_and_c_avoid_own_type(self):
        with pytest.raises(ConfigError):
            build_friendship_network(
                np.zeros(10, dtype=np.int8), (1.0, 1.0, 1.0, 1.0), 1.0,
                2.0, np.random.default_rng(0))

    def test_degree_must_fit_population(self):
        with pytest.raises(ConfigError):
            build_friendship_network(
                np.zeros(10, dtype=np.int8), DEFAULT_SAME, 1.0, 10.0,
                np.random.default_rng(0))


class TestBaseSatisfaction:
    def test_perfect_fit(self):
        # granted autonomy matches the preference and so does the pay mix
        s0 = base_satisfaction(np.array([0.3]), np.array([0.8]),
                               monitoring=0.7, reward_mix=0.2)
        assert s0[0] == pytest.approx(1.0)

    def test_conservative_under_full_monitoring(self):
        s0 = base_satisfaction(np.array([0.0]), np.array([0.4]),
                               monitoring=1.0, reward_mix=0.6)
        assert s0[0] == pytest.approx(1.0)

    def test_bounds(self):
        rng = np.random.default_rng(7)
        a, r = rng.random(1000), rng.random(1000)
        for m, lam in rng.random((20, 2)):
            s0 = base_satisfaction(a, r, m, lam)
            assert (s0 >= 0.0).all() and (s0 <= 1.0).all()


class TestAllocateTime:
    def test_full_satisfaction_means_no_shirking(self):
        p, c, shirk = allocate_time(np.array([1.0]), 0.5, 0.5)
        assert shirk[0] == 0.0
        assert p[0] + c[0] == pytest.approx(1.0)

    def test_zero_satisfaction_hits_shirk_max(self):
        p, c, shirk = allocate_time(np.array([0.0]), 0.5, 0.5,
                                    shirk_max=0.5, monitoring=0.9,
                                    deterrence=1.5,
                                    base_satisfaction=np.array([0.0]))
        assert shirk[0] == pytest.approx(0.5)

    def test_shares_sum_to_one(self):
        rng = np.random.default_rng(11)
        s = rng.random(200)
        p, c, shirk = allocate_time(s, 0.3, 0.6, monitoring=0.4)
        np.testing.assert_allclose(p + c + shirk, 1.0)
        for arr in (p, c, shirk):
            assert (arr >= -1e-12).all() and (arr <= 1.0 + 1e-12).all()

    def test_shirk_monotone_in_satisfaction(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            lam, norm, m = rng.random(3)
            _, _, lo = allocate_time(np.array([0.3]), lam, norm,
                                     monitoring=m, deterrence=1.5,
                                     base_satisfaction=np.array([0.3]))
            _, _, hi = allocate_time(np.array([0.7]), lam, norm,
                                     monitoring=m, deterrence=1.5,
                                     base_satisfaction=np.array([0.7]))
            assert lo[0] >= hi[0]

    def test_cooperation_monotone_in_mix_and_norm(self):
        s = np.array([0.6])
        _, c1, _ = allocate_time(s, 0.2, 0.5)
        _, c2, _ = allocate_time(s, 0.8, 0.5)
        assert c2[0] >= c1[0]
        _, c3, _ = allocate_time(s, 0.5, 0.2)
        _, c4, _ = allocate_time(s, 0.5, 0.8)
        assert c4[0] >= c3[0]

    def test_monitoring_deters_the_engaged(self):
        s = np.array([0.6])
        _, _, relaxed = allocate_time(s, 0.5, 0.5, monitoring=0.0)
        _, _, watched = allocate_time(s, 0.5, 0.5, monitoring=1.0,
                                      deterrence=1.5)
        assert watched[0] < relaxed[0]


class TestIndividualOutput:
    def test_kappa_zero_ignores_cooperation(self):
        assert individual_output(1.0, 1.0, 0.0, kappa=0.0) == pytest.approx(1.0)

    def test_back_out_from_initial_values(self):
        # 500 workers at this per-worker output produce the initial total
        out = individual_output(1.1176, 1.0, 1.0, kappa=0.5)
        assert 500 * out == pytest.approx(558.79, abs=0.02)

    def test_symmetric_algebra(self):
        assert individual_output(2.0, 0.25, 0.25, kappa=0.5) == \
            pytest.approx(0.5)

    def test_kappa_one_with_no_cooperation(self):
        assert individual_output(1.0, 0.5, 0.0, kappa=1.0) == 0.0

    def test_homogeneous_in_productivity(self):
        rng = np.random.default_rng(17)
        p, cbar = rng.random(2)
        one = individual_output(1.0, p, cbar, 0.5)
        three = individual_output(3.0, p, cbar, 0.5)
        assert three == pytest.approx(3.0 * one)

    def test_equals_productivity_at_full_effort(self):
        assert individual_output(1.7, 1.0, 1.0, 0.37) == pytest.approx(1.7)


class TestReward:
    def strategy(self, lam, mu, base=8.0):
        return ManagementStrategy(monitoring=0.5, reward_mix=lam,
                                  bonus_rate=mu, base_wage=base, kappa=0.5)

    def test_base_wage_only_at_zero_output(self):
        pay = reward(np.array([0.0, 2.0]), self.strategy(0.0, 1.0))
        assert pay[0] == pytest.approx(8.0)

    def test_full_pooling_pays_everyone_alike(self):
        pay = reward(np.array([0.2, 1.4, 0.9]), self.strategy(1.0, 2.0))
        assert np.ptp(pay) == pytest.approx(0.0)

    def test_mixed_arithmetic(self):
        # lam=0.5, mu=2, base 0: team of two with outputs 1 and 0
        pay = reward(np.array([1.0, 0.0]), self.strategy(0.5, 2.0, base=0.0))
        assert pay[0] == pytest.approx(2.0 * (0.5 + 0.25))

    def test_individual_mix_preserves_output_order(self):
        rng = np.random.default_rng(23)
        out = rng.random(50)
        pay = reward(out, self.strategy(0.0, 1.5))
        assert (np.argsort(pay) == np.argsort(out)).all()


class TestSatisfactionUpdates:
    def test_relaxation_moves_towards_base(self):
        s = behavior.relax_satisfaction(np.array([0.2]), np.array([0.7]), 0.1)
        assert s[0] == pytest.approx(0.25)

    def test_warning_penalty_and_floor(self):
        s = behavior.apply_warning_penalty(
            np.array([0.5, 0.1]), np.array([1, 1]), 0.2)
        assert s[0] == pytest.approx(0.3)
        assert s[1] == 0.0


class TestMonitorAndWarn:
    def test_no_monitoring_no_warnings(self):
        warned = monitor_and_warn(np.full(100, 0.5), 0.0, 0.2,
                                  np.random.default_rng(0))
        assert not warned.any()

    def test_certain_detection_at_full_monitoring(self):
        warned = monitor_and_warn(np.array([0.3]), 1.0, 0.2,
                                  np.random.default_rng(0))
        assert warned.all()

    def test_shirking_within_tolerance_is_safe(self):
        warned = monitor_and_warn(np.array([0.19]), 1.0, 0.2,
                                  np.random.default_rng(0))
        assert not warned.any()

    def test_detection_frequency(self):
        rng = np.random.default_rng(99)
        hits = sum(monitor_and_warn(np.array([0.3]), 0.5, 0.2, rng)[0]
                   for _ in range(10_000))
        assert hits / 10_000 == pytest.approx(0.5, abs=0.02)


class TestInteractionIntensity:
    def test_new_pairing_starts_at_zero_mean(self):
        intensity = np.zeros((4, 4))
        assert mean_intensity(intensity, np.array([0, 1]))[0] == 0.0

    def test_convergence_to_min_cooperation(self):
        intensity = np.zeros((2, 2))
        c = np.array([1.0, 1.0])
        for _ in range(600):
            update_interaction_intensity(intensity, [np.array([0, 1])], c, 0.1)
        assert intensity[0, 1] == pytest.approx(1.0, abs=1e-6)

    def test_fifty_step_geometric_series(self):
        intensity = np.zeros((2, 2))
        c = np.array([0.5, 0.5])
        for _ in range(50):
            update_interaction_intensity(intensity, [np.array([0, 1])], c, 0.1)
        expected = 0.5 * (1.0 - 0.9 ** 50)
        assert intensity[0, 1] == pytest.approx(expected, rel=1e-9)

    def test_separated_pairs_decay(self):
        intensity = np.zeros((3, 3))
        c = np.array([0.8, 0.8, 0.0])
        update_interaction_intensity(intensity, [np.array([0, 1])], c, 0.1)
        level = intensity[0, 1]
        update_interaction_intensity(intensity, [np.array([0, 2])], c, 0.1)
        assert intensity[0, 1] == pytest.approx(0.9 * level)

    def test_dense_update_matches_per_pair_recursion(self):
        rng = np.random.default_rng(31)
        n = 30
        intensity = rng.random((n, n)).astype(np.float64)
        intensity = (intensity + intensity.T) / 2
        np.fill_diagonal(intensity, 0.0)
        c = rng.random(n)
        rosters = [np.arange(0, 12), np.arange(12, 20)]
        expected = intensity * 0.9
        for roster in rosters:
            for i in roster:
                for j in roster:
                    if i != j:
                        expected[i, j] += 0.1 * min(c[i], c[j])
        update_interaction_intensity(intensity, rosters, c, 0.1)
        np.testing.assert_allclose(intensity, expected, atol=1e-12)

    def test_isolated_worker_has_zero_mean(self):
        intensity = np.ones((5, 5))
        assert mean_intensity(intensity, np.array([2])).tolist() == [0.0]


class TestHillClimb:
    def test_moves_and_clips(self):
        assert behavior.hill_climb(0.5, +1, 0.05, 0.0, 1.0) == 0.55
        assert behavior.hill_climb(1.0, +1, 0.05, 0.0, 1.0) == 1.0
        assert behavior.hill_climb(0.0, -1, 0.05, 0.0, 1.0) == 0.0


def test_cooperation_norm_fixed_point():
    # at the solved norm, the implied mean cooperation reproduces itself
    s0 = np.array([0.6, 0.8, 0.7])
    lam = 0.5
    shirk = behavior.shirk_level(s0, s0, 0.5, 0.5, 1.5)
    norm = behavior.solve_cooperation_norm(lam, float(1.0 - shirk.mean()))
    _, c, _ = allocate_time(s0, lam, norm, 0.5, 0.5, 1.5, s0)
    assert c.mean() == pytest.approx(norm, rel=1e-12)
