"""scikit-learn style wrappers around the sampler.

``AdaptiveParallelTempering`` exposes the run configuration as estimator
parameters (so ``get_params``/``set_params``/``clone`` work) and samples a
target in :meth:`~AdaptiveParallelTempering.fit`.  ``BayesianBridgeRegression``
is a regressor whose ``fit`` samples the bridge posterior.
"""
import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .ladder import GAP_BOUNDS
from .linalg import ols_fit
from .rwm import THETA_BOUNDS
from .sampler import SamplerConfig, run
from .targets import BridgeModel, TargetDensity, build_target, standardize


class AdaptiveParallelTempering(BaseEstimator):
    """Adaptive parallel tempering sampler.

    Parameters mirror :class:`~aptemper.sampler.SamplerConfig`.  After
    :meth:`fit`, the level-1 chain of the main phase is in ``samples_``
    and the run diagnostics are in ``summary_``.

    Examples
    --------
    >>> from aptemper.estimators import AdaptiveParallelTempering
    >>> apt = AdaptiveParallelTempering(n_levels=4, burn_in=100, n_iter=200)
    >>> apt.fit("peaks20").samples_.shape
    (200, 2)
    """

    def __init__(self, n_levels=4, strategy="ee", t_max=100.0, temps=None, gamma_c=0.5,
                 gamma_alpha=0.6, burn_in=0, n_iter=1000, reduction="off", n0=None,
                 check_interval=1000, theta_bounds=THETA_BOUNDS, gap_bounds=GAP_BOUNDS,
                 theta_init=None, thin=1, record="base", n_threads=1, random_state=0):
        self.n_levels = n_levels
        self.strategy = strategy
        self.t_max = t_max
        self.temps = temps
        self.gamma_c = gamma_c
        self.gamma_alpha = gamma_alpha
        self.burn_in = burn_in
        self.n_iter = n_iter
        self.reduction = reduction
        self.n0 = n0
        self.check_interval = check_interval
        self.theta_bounds = theta_bounds
        self.gap_bounds = gap_bounds
        self.theta_init = theta_init
        self.thin = thin
        self.record = record
        self.n_threads = n_threads
        self.random_state = random_state

    def to_config(self, target, start=None):
        return SamplerConfig(
            target=target, strategy=self.strategy, levels_initial=self.n_levels, t_max=self.t_max,
            temps=self.temps, n0=self.n0, check_interval=self.check_interval,
            reduction=self.reduction, gamma_c=self.gamma_c, gamma_alpha=self.gamma_alpha,
            burn_in=self.burn_in, main_iters=self.n_iter, seed=self.random_state,
            theta_bounds=tuple(self.theta_bounds), gap_bounds=tuple(self.gap_bounds),
            theta_init=self.theta_init, start=start, thin=self.thin, record=self.record,
            threads=self.n_threads,
        ).validate()

    def fit(self, target, start=None):
        """Sample ``target`` (a :class:`TargetDensity`, config mapping, path or built-in name)."""
        if not isinstance(target, TargetDensity):
            target = build_target(target)
        trace, summary = run(self.to_config(target, start), target=target)
        self.target_ = target
        self.trace_ = trace
        self.summary_ = summary
        self.samples_ = trace.base
        self.log_density_ = trace.base_energy
        self.ladder_ = trace.final_state.ladder
        self.levels_ = trace.final_state.levels
        self.n_levels_ = trace.final_state.L
        return self

    def sample(self, target, start=None):
        return self.fit(target, start).samples_


class BayesianBridgeRegression(RegressorMixin, BaseEstimator):
    """Linear regression with a bridge prior ``exp(-lam |b|**q)``, sampled by adaptive PT.

    Features are standardized and the response centered internally; the
    sampler starts from the OLS fit unless ``start`` is given.  ``coef_`` and
    ``intercept_`` are posterior means mapped back to the original units.
    """

    def __init__(self, lam=1.0, q=0.5, n_levels=7, strategy="ee", t_max=100.0, gamma_c=0.5,
                 gamma_alpha=0.6, burn_in=2000, n_iter=10000, reduction="off",
                 check_interval=1000, start=None, random_state=0):
        self.lam = lam
        self.q = q
        self.n_levels = n_levels
        self.strategy = strategy
        self.t_max = t_max
        self.gamma_c = gamma_c
        self.gamma_alpha = gamma_alpha
        self.burn_in = burn_in
        self.n_iter = n_iter
        self.reduction = reduction
        self.check_interval = check_interval
        self.start = start
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        Xs, yc, report = standardize(X, y)
        model = BridgeModel(Xs, yc, lam=self.lam, q=self.q, intercept=report.y_shift)
        if self.start is not None:
            start = np.asarray(self.start, dtype=float)
        else:
            coeffs, _, resid_var = ols_fit(Xs, yc)
            start = np.append(coeffs, 0.5 * np.log(resid_var))
        sampler = AdaptiveParallelTempering(
            n_levels=self.n_levels, strategy=self.strategy, t_max=self.t_max,
            gamma_c=self.gamma_c, gamma_alpha=self.gamma_alpha, burn_in=self.burn_in,
            n_iter=self.n_iter, reduction=self.reduction, check_interval=self.check_interval,
            random_state=self.random_state,
        ).fit(model, start=start)
        draws = sampler.samples_
        self.sampler_ = sampler
        self.standardization_ = report
        self.coef_samples_ = draws[:, :-1]
        self.log_sigma_samples_ = draws[:, -1]
        self.coef_standardized_ = self.coef_samples_.mean(axis=0)
        self.coef_ = self.coef_standardized_ / report.x_scale
        self.intercept_ = float(report.y_shift - report.x_shift @ self.coef_)
        self.sigma_ = float(np.exp(self.log_sigma_samples_).mean())
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ self.coef_ + self.intercept_
