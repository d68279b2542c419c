import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp
from scipy import stats

from fadingnet import scaling
from fadingnet.decentralized import (
    SlackFunctions,
    ThresholdPolicy,
    concentration_check,
    jensen_bound,
    strategy1_activate,
    topk_activate,
)
from fadingnet.fading import RAYLEIGH, sample_channel_matrix, tail_probability
from fadingnet.network import NetworkParams, evaluate
from fadingnet.rng import Seed

PARAMS2 = NetworkParams(2)


def test_threshold_rule():
    G = np.diag([0.5, 2.0])
    assert strategy1_activate(G, ThresholdPolicy(1.0, math.exp(-1)), PARAMS2).tolist() == [0.0, 1.0]


def test_zero_threshold_activates_everything():
    G = sample_channel_matrix(50, RAYLEIGH, Seed(2))
    assert np.all(strategy1_activate(G, ThresholdPolicy.for_model(RAYLEIGH, 0.0), NetworkParams(50)) == 1.0)


def test_tie_deactivates():
    G = np.diag([1.0, 1.5])
    assert strategy1_activate(G, ThresholdPolicy(1.0, 0.0), PARAMS2).tolist() == [0.0, 1.0]


def test_policy_q_matches_tail():
    policy = ThresholdPolicy.for_model(RAYLEIGH, 3.0)
    assert abs(policy.q - tail_probability(RAYLEIGH, 3.0)) <= 1e-12


@given(hnp.arrays(float, (6, 6), elements=st.floats(0, 10)), hnp.arrays(float, (6, 6), elements=st.floats(0, 10)),
       st.floats(0, 10))
def test_activation_ignores_cross_gains(G, other, t):
    H = other.copy()
    np.fill_diagonal(H, np.diagonal(G))
    policy = ThresholdPolicy(t, 0.5)
    params = NetworkParams(6)
    assert np.array_equal(strategy1_activate(G, policy, params), strategy1_activate(H, policy, params))


@given(hnp.arrays(float, 8, elements=st.floats(0, 10)), st.floats(0, 10), st.floats(0, 10))
def test_activation_monotone_in_threshold(g, t1, t2):
    lo, hi = sorted((t1, t2))
    params = NetworkParams(8)
    at_lo = strategy1_activate(g, ThresholdPolicy(lo, 0.5), params) > 0
    at_hi = strategy1_activate(g, ThresholdPolicy(hi, 0.5), params) > 0
    assert np.all(at_lo | ~at_hi)


class TestTopK:
    def test_edges(self):
        G = np.diag([3.0, 1.0, 2.0])
        params = NetworkParams(3)
        assert topk_activate(G, 0, params).tolist() == [0, 0, 0]
        assert topk_activate(G, 3, params).tolist() == [1, 1, 1]
        assert topk_activate(G, 2, params).tolist() == [1, 0, 1]

    def test_ties_to_lowest_index(self):
        assert topk_activate(np.array([1.0, 2.0, 2.0, 2.0]), 2, NetworkParams(4)).tolist() == [0, 1, 1, 0]

    def test_rejects_large_k(self):
        with pytest.raises(ValueError):
            topk_activate(np.ones(3), 4, NetworkParams(3))

    @given(hnp.arrays(float, 10, elements=st.floats(0, 5), unique=True), st.floats(0, 5))
    def test_matches_threshold_without_ties(self, g, t):
        params = NetworkParams(10)
        threshold_set = strategy1_activate(g, ThresholdPolicy(t, 0.5), params) > 0
        k = int(threshold_set.sum())
        topk_set = topk_activate(g, k, params) > 0
        assert np.all(topk_set | ~threshold_set)

    @given(hnp.arrays(float, 12, elements=st.floats(0, 5)), st.integers(0, 12))
    def test_active_dominate_inactive(self, g, k):
        active = topk_activate(g, k, NetworkParams(12)) > 0
        assert active.sum() == k
        if 0 < k < 12:
            assert g[active].min() >= g[~active].max()


class TestJensen:
    def test_empty(self):
        assert jensen_bound(np.eye(2), np.zeros(2), 0.5, PARAMS2) == 0.0

    def test_single_link(self):
        assert jensen_bound(np.array([[1.0]]), np.array([1.0]), 0.5, NetworkParams(1)) == pytest.approx(
            0.4054651081081644, abs=1e-15
        )

    def test_precondition(self):
        with pytest.raises(ValueError):
            jensen_bound(np.diag([1.0, 0.2]), np.ones(2), 0.5, PARAMS2)

    @given(st.integers(0, 2**32), st.integers(2, 60), st.floats(0, 5))
    def test_bound_below_exact_sum_rate(self, master, n, t):
        G = sample_channel_matrix(n, RAYLEIGH, Seed(master))
        params = NetworkParams(n)
        p = strategy1_activate(G, ThresholdPolicy.for_model(RAYLEIGH, t), params)
        assert evaluate(G, p, params).sum_rate >= jensen_bound(G, p, t, params)


class TestConcentration:
    def test_degenerate_q_one(self):
        policy = ThresholdPolicy.for_model(RAYLEIGH, 0.0)
        assert concentration_check(200, RAYLEIGH, policy, 5, 0.01, Seed(1)) == 1.0

    def test_three_sigma_band_at_optimum(self):
        n = 100_000
        t, _ = scaling.optimize_threshold(n, RAYLEIGH)
        policy = ThresholdPolicy.for_model(RAYLEIGH, t)
        # binomial oracle: P(|k - nq| < 3 sqrt(nq)) is about 0.997
        nq = n * policy.q
        band = 3 * math.sqrt(nq)
        oracle = stats.binom.cdf(math.ceil(nq + band) - 1, n, policy.q) - stats.binom.cdf(math.floor(nq - band), n, policy.q)
        assert oracle > 0.99
        assert concentration_check(n, RAYLEIGH, policy, 200, 3.0, Seed(4)) >= 0.95

    def test_narrow_band_rarely_hit(self):
        policy = ThresholdPolicy.for_model(RAYLEIGH, math.log(2))
        # band 0.01 * sqrt(500) ~ 0.22 < 1/2, so only k = 500 counts: P ~ 0.025
        assert stats.binom.pmf(500, 1000, 0.5) < 0.03
        assert concentration_check(1000, RAYLEIGH, policy, 200, 0.01, Seed(6)) < 0.1


def test_slack_ranges():
    with pytest.raises(ValueError):
        SlackFunctions(xi_exponent=0.5)
    with pytest.raises(ValueError):
        SlackFunctions(psi_exponent=1.0)
    s = SlackFunctions()
    assert s.xi(16.0) == 2.0 and s.psi(9.0) == 3.0
