import numpy as np

from .base import TargetDensity


class ProductExtendedTarget(TargetDensity):
    """``base`` times independent uniforms on the boxes in ``bounds``."""

    def __init__(self, base, bounds):
        bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
        if np.any(bounds[:, 1] <= bounds[:, 0]):
            raise ValueError("every bound needs upper > lower")
        self.base = base
        self.bounds = bounds
        self.extra_dims = bounds.shape[0]
        self.dim = base.dim + self.extra_dims
        self._log_volume = float(np.log(bounds[:, 1] - bounds[:, 0]).sum())

    def log_unnorm(self, x):
        return product_log_density(self, x)

    def default_start(self):
        start = np.zeros(self.dim)
        start[:self.base.dim] = self.base.default_start()
        start[self.base.dim:] = self.bounds.mean(axis=1)
        return start

    def mode_centers(self):
        return self.base.mode_centers()


def product_log_density(t, x):
    x = t._check(x)
    extra = x[t.base.dim:]
    if np.any(extra < t.bounds[:, 0]) or np.any(extra > t.bounds[:, 1]):
        return -np.inf
    return t.base.log_unnorm(x[:t.base.dim]) - t._log_volume
