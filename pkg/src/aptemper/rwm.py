"""Per-level adaptive random-walk Metropolis.

Each tempered level keeps its own running mean, Cholesky factor of the
running covariance and log proposal scale ``theta``.  Proposals are
``x + exp(theta) * L z``.
"""
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .exceptions import TargetEvaluationError
from .linalg import chol_rank_one_update, sample_mvn

TARGET_ACCEPT = 0.234
THETA_BOUNDS = (math.log(1e-3), math.log(1e3))


@dataclass
class LevelState:
    x: np.ndarray
    mu: np.ndarray
    sigma_chol: np.ndarray
    theta: float
    beta: float
    last_eta: float = 1.0
    log_p: float = math.nan  # cached log-target at x
    theta_bounds: tuple = THETA_BOUNDS

    @property
    def dim(self):
        return self.x.shape[0]


class RWResult(NamedTuple):
    x: np.ndarray
    log_p: float
    eta: float
    accepted: bool


def initial_theta(dim):
    """Log-scale just below ``2.38 / sqrt(dim)``."""
    return math.log(2.38 / math.sqrt(dim)) - 0.5


def evaluate(target, x):
    value = float(target.log_unnorm(x))
    if math.isnan(value) or value == math.inf:
        raise TargetEvaluationError(f"target returned {value} at {x!r}")
    return value


def init_level(target, x0, beta, theta=None, theta_bounds=THETA_BOUNDS):
    x0 = np.array(x0, dtype=float)
    d = x0.shape[0]
    if theta is None:
        theta = initial_theta(d)
    lo, hi = theta_bounds
    return LevelState(
        x=x0, mu=x0.copy(), sigma_chol=np.eye(d), theta=float(min(max(theta, lo), hi)),
        beta=float(beta), log_p=evaluate(target, x0), theta_bounds=tuple(theta_bounds),
    )


def log_accept(beta, log_p_new, log_p_old):
    """``min(0, beta * (log_p_new - log_p_old))`` with the edge cases pinned down.

    ``beta == 0`` always accepts; a move between two points outside the
    support (both ``-inf``) is accepted so a stranded chain can diffuse.
    """
    if beta == 0.0:
        return 0.0
    delta = log_p_new - log_p_old
    if math.isnan(delta):
        return 0.0
    return min(0.0, beta * delta)


def rw_step(level, target, rng):
    y = sample_mvn(level.x, level.sigma_chol, math.exp(level.theta), rng)
    log_p_y = evaluate(target, y)
    if math.isnan(level.log_p):
        level.log_p = evaluate(target, level.x)
    log_eta = log_accept(level.beta, log_p_y, level.log_p)
    eta = math.exp(log_eta)
    if rng.random() < eta:
        return RWResult(y, log_p_y, eta, True)
    return RWResult(level.x, level.log_p, eta, False)


def adapt_level(level, x_tilde, eta, gamma):
    """One Robbins-Monro step on mean, covariance factor and log-scale.

    The covariance uses the mean from *before* this update.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if gamma == 0.0:
        return replace(level, last_eta=eta)
    x_tilde = np.asarray(x_tilde, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        chol = chol_rank_one_update(level.sigma_chol, gamma, x_tilde - level.mu)
    diag = np.diag(chol)
    if not np.all(np.isfinite(diag) & (diag > 0)):
        # the factor underflowed after a long stall; keep the last usable one
        chol = level.sigma_chol
    mu = (1.0 - gamma) * level.mu + gamma * x_tilde
    lo, hi = level.theta_bounds
    theta = min(max(level.theta + gamma * (eta - TARGET_ACCEPT), lo), hi)
    return replace(level, mu=mu, sigma_chol=chol, theta=theta, last_eta=eta)
