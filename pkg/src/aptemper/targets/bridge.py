import numpy as np

from ..exceptions import DimensionMismatch
from .base import TargetDensity


class BridgeModel(TargetDensity):
    """Posterior of Bayesian bridge regression on a standardized design.

    The sampled state is ``(beta_1, ..., beta_p, s)`` with ``s = log(sigma)``.
    Priors: ``exp(-lam * |beta_j|**q)`` per coefficient and ``1 / sigma**2``
    on the noise scale; the latter becomes ``exp(-s)`` after the change of
    variables. The intercept is profiled out by centering ``y``.
    """

    def __init__(self, X, y, lam=1.0, q=0.5, intercept=0.0, center_tol=1e-8):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise DimensionMismatch(f"X {X.shape} and y {y.shape} do not align")
        if not (lam > 0 and q > 0):
            raise ValueError("lam and q must be positive")
        scale = max(1.0, np.abs(X).max(), np.abs(y).max())
        if np.abs(X.mean(axis=0)).max() > center_tol * scale or abs(y.mean()) > center_tol * scale:
            raise ValueError("X columns and y must be centered")
        self.X = X
        self.y = y
        self.lam = float(lam)
        self.q = float(q)
        self.intercept = float(intercept)
        self.n, self.p = X.shape
        self.dim = self.p + 1

    def log_unnorm(self, x):
        x = self._check(x)
        return bridge_log_posterior(self, x[:-1], x[-1])

    def default_start(self):
        from ..linalg import ols_fit

        coeffs, _, resid_var = ols_fit(self.X, self.y)
        return np.append(coeffs, 0.5 * np.log(resid_var))


def bridge_log_posterior(m, beta, s):
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (m.p,):
        raise DimensionMismatch(f"expected {m.p} coefficients, got shape {beta.shape}")
    s = float(s)
    resid = m.y - m.X @ beta
    rss = float(resid @ resid)
    # rss / sigma^2 through exp(-2s) so a huge s cannot overflow
    with np.errstate(over="ignore"):
        fit = 0.5 * rss * np.exp(-2.0 * s) if rss > 0 else 0.0
    loglik = -0.5 * m.n * (np.log(2 * np.pi) + 2.0 * s) - fit
    logprior = -m.lam * float(np.sum(np.abs(beta) ** m.q))
    return loglik + logprior - s
