"""Small dense linear algebra used by the samplers.

Cholesky factors are plain lower-triangular ``(d, d)`` float arrays.
"""
import numpy as np

from .exceptions import DimensionMismatch, NotPositiveDefinite, SingularDesign

SYMMETRY_TOL = 1e-10
PIVOT_FLOOR = 1e-12
JITTER = 1e-10


def _as_square(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def chol_from_dense(A):
    """Lower Cholesky factor of a symmetric positive-definite matrix.

    A pivot below ``PIVOT_FLOOR * trace(A) / dim`` triggers one retry with
    ``JITTER * I`` added; a second failure raises :class:`NotPositiveDefinite`.
    """
    A = _as_square(A)
    scale = max(np.max(np.abs(A)), 1.0)
    if np.max(np.abs(A - A.T)) > SYMMETRY_TOL * scale:
        raise NotPositiveDefinite("matrix is not symmetric")
    d = A.shape[0]
    floor = PIVOT_FLOOR * np.trace(A) / d
    for attempt in range(2):
        M = A if attempt == 0 else A + JITTER * np.eye(d)
        try:
            L = np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            continue
        if floor > 0 and np.all(np.diag(L) ** 2 > floor):
            return L
    raise NotPositiveDefinite("matrix is not positive definite")


def chol_rank_one_update(L, gamma, v):
    """Factor of ``(1 - gamma) L L^T + gamma v v^T`` in O(d^2).

    The factor is first scaled by ``sqrt(1 - gamma)``; the outer product is
    then folded in with the usual sequence of Givens-like rotations.
    """
    L = np.asarray(L, dtype=float)
    v = np.asarray(v, dtype=float)
    d = L.shape[0]
    if v.shape != (d,):
        raise DimensionMismatch(f"vector of length {v.shape} for factor of dim {d}")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if gamma == 0.0:
        return L.copy()
    M = np.sqrt(1.0 - gamma) * L
    x = np.sqrt(gamma) * v
    for k in range(d):
        mkk = M[k, k]
        r = np.hypot(mkk, x[k])
        c = r / mkk
        s = x[k] / mkk
        M[k, k] = r
        if k + 1 < d:
            M[k + 1:, k] = (M[k + 1:, k] + s * x[k + 1:]) / c
            x[k + 1:] = c * x[k + 1:] - s * M[k + 1:, k]
    return M


def reconstruct(L):
    L = np.asarray(L, dtype=float)
    return L @ L.T


def sample_mvn(mean, L, scale, rng):
    """Draw ``mean + scale * L z`` with ``z`` standard normal from ``rng``."""
    mean = np.asarray(mean, dtype=float)
    L = np.asarray(L, dtype=float)
    if L.shape != (mean.shape[0], mean.shape[0]):
        raise DimensionMismatch(f"mean of length {mean.shape[0]} vs factor {L.shape}")
    z = rng.standard_normal(mean.shape[0])
    return mean + (scale * L) @ z


def ols_fit(X, y):
    """Ordinary least squares with an intercept.

    Returns ``(coeffs, intercept, resid_var)`` where ``resid_var`` is
    ``RSS / (n - p - 1)``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"X {X.shape} and y {y.shape} do not align")
    n, p = X.shape
    if n <= p + 1:
        raise SingularDesign(f"need n > p + 1 observations, got n={n}, p={p}")
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    Q, R = np.linalg.qr(Xc)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag.min() <= 1e-10 * diag.max():
        raise SingularDesign("centered design is rank deficient")
    coeffs = np.linalg.solve(R, Q.T @ yc)
    resid = yc - Xc @ coeffs
    resid_var = float(resid @ resid) / (n - p - 1)
    intercept = float(y_mean - x_mean @ coeffs)
    return coeffs, intercept, resid_var
