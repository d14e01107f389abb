import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from aptemper.exceptions import TargetEvaluationError
from aptemper.linalg import reconstruct
from aptemper.rwm import THETA_BOUNDS, adapt_level, init_level, initial_theta, log_accept, rw_step
from aptemper.targets import GaussianMixture
from aptemper.targets.base import TargetDensity


class Fixed(TargetDensity):
    """Log-density given by a callable, for pinning acceptance cases."""

    def __init__(self, fn, dim=1):
        self.fn = fn
        self.dim = dim

    def log_unnorm(self, x):
        return self.fn(np.asarray(x))


def normal1d():
    return GaussianMixture([[0.0]], 1.0)


class TestLogAccept:
    def test_uphill_always_one(self):
        assert log_accept(1.0, -1.0, -3.0) == 0.0
        assert log_accept(0.3, 5.0, 5.0) == 0.0

    def test_infinite_temperature(self):
        assert log_accept(0.0, -1e9, 0.0) == 0.0

    def test_half(self):
        assert math.exp(log_accept(1.0, math.log(0.5), 0.0)) == pytest.approx(0.5, rel=1e-15)

    def test_both_outside_support(self):
        assert log_accept(1.0, -math.inf, -math.inf) == 0.0

    def test_into_zero_density(self):
        assert log_accept(0.5, -math.inf, 0.0) == -math.inf


class TestRwStep:
    def test_uphill_move_accepted(self):
        # density increasing in x, and a zero-scale proposal still counts as uphill
        t = Fixed(lambda x: float(x[0]))
        lv = init_level(t, [0.0], 1.0)
        lv.theta = math.log(1e-3)
        rng = np.random.default_rng(0)
        for _ in range(50):
            res = rw_step(lv, t, rng)
            if res.x[0] >= lv.x[0]:
                assert res.eta == 1.0 and res.accepted

    def test_beta_zero_accepts_everything(self):
        t = normal1d()
        lv = init_level(t, [0.0], 0.0, theta=math.log(50.0))
        rng = np.random.default_rng(1)
        for _ in range(100):
            res = rw_step(lv, t, rng)
            assert res.eta == 1.0 and res.accepted

    def test_eta_half(self):
        t = Fixed(lambda x: 0.0 if x[0] == 0.0 else math.log(0.5))
        lv = init_level(t, [0.0], 1.0)
        res = rw_step(lv, t, np.random.default_rng(2))
        assert res.eta == pytest.approx(0.5, rel=1e-15)

    def test_nan_target_raises(self):
        t = Fixed(lambda x: 0.0 if x[0] == 0.0 else math.nan)
        lv = init_level(t, [0.0], 1.0)
        with pytest.raises(TargetEvaluationError):
            rw_step(lv, t, np.random.default_rng(0))

    def test_frozen_chain_samples_standard_normal(self):
        t = normal1d()
        lv = init_level(t, [0.0], 1.0, theta=math.log(2.4))
        rng = np.random.default_rng(12345)
        for _ in range(2000):
            res = rw_step(lv, t, rng)
            lv.x, lv.log_p = res.x, res.log_p
        out = np.empty(200_000)
        for k in range(out.size):
            res = rw_step(lv, t, rng)
            lv.x, lv.log_p = res.x, res.log_p
            out[k] = res.x[0]
        assert stats.kstest(out, "norm").statistic < 0.02


class TestAdaptLevel:
    def make(self, d=3, seed=0):
        rng = np.random.default_rng(seed)
        t = GaussianMixture([np.zeros(d)], 1.0)
        return init_level(t, rng.normal(size=d), 1.0), rng

    def test_gamma_zero_unchanged(self):
        lv, rng = self.make()
        out = adapt_level(lv, rng.normal(size=3), 0.7, 0.0)
        np.testing.assert_array_equal(out.mu, lv.mu)
        np.testing.assert_array_equal(out.sigma_chol, lv.sigma_chol)
        assert out.theta == lv.theta

    def test_theta_fixed_point_large_gamma(self):
        lv, rng = self.make()
        out = adapt_level(lv, rng.normal(size=3), 0.234, 0.999)
        assert out.theta == lv.theta

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0.0, 0.999), min_size=1, max_size=30))
    def test_theta_fixed_point_any_schedule(self, gammas):
        lv, rng = self.make()
        theta0 = lv.theta
        for g in gammas:
            lv = adapt_level(lv, rng.normal(size=3), 0.234, g)
        assert lv.theta == theta0

    def test_gamma_one_rejected(self):
        lv, rng = self.make()
        with pytest.raises(ValueError):
            adapt_level(lv, rng.normal(size=3), 0.5, 1.0)

    def test_theta_clamped(self):
        lv, rng = self.make()
        for _ in range(100):
            lv = adapt_level(lv, lv.mu, 1.0, 0.9)
        assert lv.theta == THETA_BOUNDS[1]

    def test_dense_recursion_oracle(self):
        d = 4
        lv, rng = self.make(d, seed=7)
        mu = lv.mu.copy()
        sigma = np.eye(d)
        theta = lv.theta
        for n in range(1, 101):
            g = min(0.999, 0.8 * n ** -0.6)
            x = rng.normal(size=d) * np.array([1.0, 2.0, 0.5, 3.0]) + 1.0
            eta = rng.uniform()
            lv = adapt_level(lv, x, eta, g)
            sigma = (1 - g) * sigma + g * np.outer(x - mu, x - mu)
            mu = (1 - g) * mu + g * x
            theta = theta + g * (eta - 0.234)
        np.testing.assert_allclose(reconstruct(lv.sigma_chol), sigma, rtol=1e-8, atol=1e-12)
        np.testing.assert_allclose(lv.mu, mu, rtol=1e-12)
        assert lv.theta == pytest.approx(theta, rel=1e-12)

    def test_positive_definite_over_many_updates(self):
        d = 5
        lv, rng = self.make(d, seed=11)
        for n in range(1, 10_001):
            g = rng.uniform(0.0, 0.999) if n % 10 == 0 else 1.0 / (n + 1)
            x = lv.mu + rng.normal(size=d) * 10 ** rng.uniform(-6, 3)
            lv = adapt_level(lv, x, rng.uniform(), g)
            assert np.all(np.diag(lv.sigma_chol) > 0)


def test_initial_theta():
    assert initial_theta(4) == pytest.approx(math.log(1.19) - 0.5)


def test_stalled_chain_keeps_usable_factor():
    t = GaussianMixture([np.zeros(2)], 1.0)
    lv = init_level(t, np.zeros(2), 1.0)
    for _ in range(2000):
        lv = adapt_level(lv, lv.mu, 0.0, 0.9)
    diag = np.diag(lv.sigma_chol)
    assert np.all(np.isfinite(diag) & (diag > 0))
