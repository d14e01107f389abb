"""Temperature ladder: log-gap Robbins-Monro adaptation and level-count reduction."""
import math
from dataclasses import dataclass, field, replace

import numpy as np

TARGET_SWAP = 0.234
GAP_BOUNDS = (1e-4, 1e6)
OPTIMAL_SCALE = 2.38


@dataclass(frozen=True)
class LadderState:
    """Temperatures ``T_1 = 1 < T_2 < ... < T_L``.

    The adjacent gaps ``T_{l+1} - T_l`` are the stored quantity; temperatures
    and inverse temperatures are derived from them so that an update that
    leaves the gaps untouched reproduces the temperatures bit for bit.
    """

    gaps: np.ndarray
    L0: int
    n0: int = 0
    check_interval: int = 1000
    gap_bounds: tuple = GAP_BOUNDS
    temps: np.ndarray = field(init=False, repr=False, compare=False)
    betas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gaps = np.asarray(self.gaps, dtype=float)
        if np.any(gaps <= 0):
            raise ValueError("temperature gaps must be positive")
        temps = np.concatenate(([1.0], 1.0 + np.cumsum(gaps)))
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "temps", temps)
        object.__setattr__(self, "betas", 1.0 / temps)

    @property
    def L(self):
        return self.gaps.shape[0] + 1


def geometric_ladder(levels, t_max=100.0, n0=0, check_interval=1000, gap_bounds=GAP_BOUNDS):
    """``T_l = t_max ** ((l - 1) / (levels - 1))`` for ``l = 1..levels``."""
    if levels < 1:
        raise ValueError("need at least one level")
    if levels == 1:
        temps = np.array([1.0])
    else:
        if not t_max > 1:
            raise ValueError("t_max must exceed 1")
        temps = t_max ** (np.arange(levels) / (levels - 1))
    return LadderState(np.diff(temps), levels, n0, check_interval, tuple(gap_bounds))


def ladder_from_temps(temps, n0=0, check_interval=1000, gap_bounds=GAP_BOUNDS):
    temps = np.asarray(temps, dtype=float)
    if temps[0] != 1.0:
        raise ValueError("the first temperature must be exactly 1")
    return LadderState(np.diff(temps), temps.shape[0], n0, check_interval, tuple(gap_bounds))


def swap_rates(ladder, energies):
    """``xi_l = min(1, (pi(x_l) / pi(x_{l+1})) ** (beta_{l+1} - beta_l))`` per adjacent pair.

    Entries are NaN where an energy is not finite.
    """
    e = np.asarray(energies, dtype=float)
    b = ladder.betas
    with np.errstate(invalid="ignore", over="ignore"):
        log_xi = np.minimum(0.0, (b[1:] - b[:-1]) * (e[:-1] - e[1:]))
    bad = ~(np.isfinite(e[:-1]) & np.isfinite(e[1:]))
    xi = np.exp(log_xi)
    xi[bad] = np.nan
    return xi


def update_gaps(ladder, xi, gamma):
    """Multiply each gap by ``exp(gamma * (xi - 0.234))``; NaN rates leave the gap alone."""
    xi = np.asarray(xi, dtype=float)
    step = gamma * (xi - TARGET_SWAP)
    step[np.isnan(step)] = 0.0
    lo, hi = ladder.gap_bounds
    gaps = np.clip(ladder.gaps * np.exp(step), lo, hi)
    return replace(ladder, gaps=gaps)


def adapt_ladder(ladder, post_swap_energies, gamma):
    if ladder.L < 2 or gamma == 0.0:
        return ladder
    return update_gaps(ladder, swap_rates(ladder, post_swap_energies), gamma)


def parse_reduction(spec):
    """``strict``, ``off`` or ``lenient:<eps>`` to ``(variant, eps)``."""
    if spec is None or spec is False:
        return "off", 0.0
    text = str(spec).strip().lower()
    if text in ("off", "strict"):
        return text, 0.0
    if text.startswith("lenient"):
        _, _, eps = text.partition(":")
        eps = float(eps) if eps else 0.1
        if not 0.0 <= eps < 1.0:
            raise ValueError("lenient epsilon must lie in [0, 1)")
        return "lenient", eps
    raise ValueError(f"unknown reduction variant {spec!r}; expected strict, lenient:<eps> or off")


def reduction_threshold(thetas, dim, variant="strict", epsilon=0.0):
    base = OPTIMAL_SCALE / math.sqrt(dim)
    if variant == "lenient":
        return min(base, (1.0 - epsilon) * float(np.exp(np.max(thetas))))
    return base


def maybe_reduce_levels(ladder, thetas, dim, n, variant="strict", epsilon=0.0):
    """Cut the ladder at the first level whose proposal scale reached the threshold.

    Acts only when ``n > n0`` and ``n`` is a multiple of ``check_interval``;
    never adds levels.
    """
    if variant == "off" or n <= ladder.n0 or n % ladder.check_interval != 0:
        return ladder
    thetas = np.asarray(thetas, dtype=float)[:ladder.L]
    hit = np.flatnonzero(np.exp(thetas) >= reduction_threshold(thetas, dim, variant, epsilon))
    if hit.size == 0:
        return ladder
    new_L = int(hit[0]) + 1
    if new_L >= ladder.L:
        return ladder
    return replace(ladder, gaps=ladder.gaps[:new_L - 1])
