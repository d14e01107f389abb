import numpy as np

from ..exceptions import DimensionMismatch
from .base import TargetDensity


class GaussianMixture(TargetDensity):
    """Mixture of isotropic normals sharing one standard deviation.

    Parameters
    ----------
    means : array-like of shape (m, d)
    sigma : float
        Per-coordinate standard deviation of every component.
    weights : array-like of shape (m,), optional
        Defaults to equal weights.
    """

    def __init__(self, means, sigma, weights=None):
        means = np.atleast_2d(np.asarray(means, dtype=float))
        m, d = means.shape
        if weights is None:
            weights = np.full(m, 1.0 / m)
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (m,):
            raise DimensionMismatch(f"{weights.shape[0]} weights for {m} components")
        if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        if m > 1:
            gaps = np.linalg.norm(means[:, None, :] - means[None, :, :], axis=-1)
            if np.any(gaps[np.triu_indices(m, 1)] == 0):
                raise ValueError("component means must be pairwise distinct")
        self.means = means
        self.weights = weights
        self.sigma = float(sigma)
        self.dim = d
        self._log_w = np.log(weights) - 0.5 * d * np.log(2 * np.pi * self.sigma ** 2)

    def log_unnorm(self, x):
        return mixture_log_density(self, x)

    def mode_centers(self):
        return self.means

    def moments(self):
        """Exact first and second raw moments per coordinate."""
        first = self.weights @ self.means
        second = self.weights @ (self.means ** 2 + self.sigma ** 2)
        return first, second

    def sample(self, n, rng):
        comp = rng.choice(len(self.weights), size=n, p=self.weights)
        return self.means[comp] + self.sigma * rng.standard_normal((n, self.dim))


def mixture_log_density(gm, x):
    """``log sum_i w_i N(x; mu_i, sigma^2 I)`` via log-sum-exp."""
    x = gm._check(x)
    diff = gm.means - x
    a = gm._log_w - 0.5 * np.einsum("ij,ij->i", diff, diff) / gm.sigma ** 2
    top = a.max()
    return float(top + np.log(np.exp(a - top).sum()))
