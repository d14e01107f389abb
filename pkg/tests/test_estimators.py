import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from aptemper.estimators import AdaptiveParallelTempering, BayesianBridgeRegression
from aptemper.sampler import run
from aptemper.targets import GaussianMixture


class TestAdaptiveParallelTempering:
    def test_params_round_trip(self):
        est = AdaptiveParallelTempering(n_levels=6, strategy="ra", random_state=4)
        params = est.get_params()
        assert params["n_levels"] == 6 and params["strategy"] == "ra"
        other = clone(est)
        assert other.get_params() == params
        other.set_params(n_levels=3)
        assert other.n_levels == 3 and est.n_levels == 6

    def test_fit_matches_functional_run(self):
        est = AdaptiveParallelTempering(n_levels=3, burn_in=10, n_iter=60, random_state=5)
        est.fit("peaks20")
        trace, summary = run(est.to_config("peaks20"))
        np.testing.assert_array_equal(est.samples_, trace.base)
        assert est.summary_.to_json() == summary.to_json()
        assert est.samples_.shape == (60, 2) and est.log_density_.shape == (60,)

    def test_accepts_target_object(self):
        target = GaussianMixture([[0.0], [3.0]], 0.5)
        samples = AdaptiveParallelTempering(n_levels=2, n_iter=30, random_state=0).sample(target)
        assert samples.shape == (30, 1)

    def test_invalid_parameter(self):
        from aptemper.exceptions import ConfigError

        with pytest.raises(ConfigError):
            AdaptiveParallelTempering(gamma_alpha=0.3).fit("peaks20")


def linear_data(seed=0, n=60):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3)) * [1.0, 5.0, 0.2] + [2.0, -1.0, 0.0]
    y = X @ np.array([3.0, -0.4, 0.0]) + 10.0 + rng.normal(scale=0.1, size=n)
    return X, y


class TestBridgeRegression:
    def test_params_and_clone(self):
        est = BayesianBridgeRegression(lam=2.0, q=0.8)
        assert clone(est).get_params() == est.get_params()

    def test_predict_before_fit(self):
        with pytest.raises(NotFittedError):
            BayesianBridgeRegression().predict(np.zeros((2, 3)))

    def test_fit_predict_strong_signal(self):
        X, y = linear_data()
        est = BayesianBridgeRegression(n_levels=3, burn_in=500, n_iter=1500, random_state=0).fit(X, y)
        assert est.coef_.shape == (3,) and est.n_features_in_ == 3
        assert est.coef_[0] == pytest.approx(3.0, abs=0.1)
        assert est.coef_[1] == pytest.approx(-0.4, abs=0.05)
        pred = est.predict(X)
        assert pred.shape == (60,)
        assert est.score(X, y) > 0.99
        assert est.coef_samples_.shape == (1500, 3) and est.log_sigma_samples_.shape == (1500,)

    def test_feature_count_checked(self):
        X, y = linear_data()
        est = BayesianBridgeRegression(n_levels=2, burn_in=10, n_iter=20, random_state=0).fit(X, y)
        with pytest.raises(ValueError):
            est.predict(X[:, :2])
