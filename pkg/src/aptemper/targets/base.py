import numpy as np

from ..exceptions import DimensionMismatch


class TargetDensity:
    """Unnormalized log-density on R^dim.

    Subclasses implement :meth:`log_unnorm`; points outside the support get
    ``-inf`` rather than an exception.
    """

    dim = None

    def log_unnorm(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.log_unnorm(x)

    def default_start(self):
        return np.zeros(self.dim)

    def mode_centers(self):
        """Known mode locations (``None`` when the target has none)."""
        return None

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"expected a point of dim {self.dim}, got shape {x.shape}")
        return x
