"""State-dependent swap proposals and the one-pair swap kernel.

A strategy maps the current level energies (log-target values) to weights
over level pairs ``i < j``.  The acceptance probability is

    alpha_ij = min(1, p_ij(T_ij x) / p_ij(x) * (pi(x_i) / pi(x_j)) ** (beta_j - beta_i))

and for strategies whose weights are unchanged by exchanging ``x_i`` and
``x_j`` (all built-in ones) the proposal ratio is exactly one.
"""
import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import DegenerateSupport


class SwapStrategy:
    """Base class; subclasses fill in :meth:`pair_weights`."""

    name = "base"
    #: ``p_ij(x) == p_ij(T_ij x)`` for every state; lets the acceptance skip the proposal ratio.
    symmetric = False
    uses_positions = False

    def pair_weights(self, energies, positions=None):
        """Unnormalized ``(L, L)`` weights; only the strict upper triangle is read."""
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"

    def __str__(self):
        return self.name


class EquiEnergy(SwapStrategy):
    """``p_ij`` proportional to ``exp(-|log pi(x_i) - log pi(x_j)|)``."""

    name = "ee"
    symmetric = True

    def pair_weights(self, energies, positions=None):
        e = np.asarray(energies, dtype=float)
        with np.errstate(invalid="ignore"):
            gap = np.abs(e[:, None] - e[None, :])
        gap[~np.isfinite(gap)] = np.inf
        iu = np.triu_indices(e.shape[0], 1)
        finite = gap[iu][np.isfinite(gap[iu])]
        if finite.size == 0:
            return np.zeros_like(gap)
        return np.exp(-(gap - finite.min()))


class AdjacentLevels(SwapStrategy):
    name = "al"
    symmetric = True

    def pair_weights(self, energies, positions=None):
        n = len(energies)
        return np.eye(n, k=1)


class RandomPairs(SwapStrategy):
    name = "ra"
    symmetric = True

    def pair_weights(self, energies, positions=None):
        n = len(energies)
        return np.triu(np.ones((n, n)), 1)


class EnergyRings(SwapStrategy):
    """Uniform over pairs whose energies fall in the same ring.

    ``boundaries`` split the real line into ``len(boundaries) + 1`` rings.
    Pairs involving an energy of ``-inf`` get no weight.
    """

    name = "rings"
    symmetric = True

    def __init__(self, boundaries):
        b = np.asarray(boundaries, dtype=float).ravel()
        if b.size == 0 or np.any(np.diff(b) <= 0):
            raise ValueError("ring boundaries must be a non-empty strictly ascending list")
        self.boundaries = b

    def ring_of(self, energies):
        return np.searchsorted(self.boundaries, np.asarray(energies, dtype=float), side="right")

    def pair_weights(self, energies, positions=None):
        e = np.asarray(energies, dtype=float)
        ring = self.ring_of(e)
        w = (ring[:, None] == ring[None, :]).astype(float)
        bad = ~np.isfinite(e)
        w[bad, :] = 0.0
        w[:, bad] = 0.0
        return w

    def __repr__(self):
        return f"EnergyRings({self.boundaries.tolist()})"

    def __str__(self):
        return "rings:" + ",".join(repr(float(b)) for b in self.boundaries)


STRATEGIES = {"ee": EquiEnergy, "al": AdjacentLevels, "ra": RandomPairs}


def parse_strategy(spec):
    """``ee``, ``al``, ``ra`` or ``rings:<b1,b2,...>``; instances pass through."""
    if isinstance(spec, SwapStrategy):
        return spec
    text = str(spec).strip().lower()
    if text in STRATEGIES:
        return STRATEGIES[text]()
    if text.startswith("rings:"):
        try:
            bounds = [float(b) for b in text[len("rings:"):].split(",") if b.strip()]
        except ValueError:
            raise ValueError(f"bad ring boundaries in {spec!r}") from None
        return EnergyRings(bounds)
    raise ValueError(f"unknown swap strategy {spec!r}; expected ee, al, ra or rings:<b1,...>")


@dataclass(frozen=True)
class PairDistribution:
    pairs: np.ndarray  # (K, 2), 0-based i < j
    probs: np.ndarray  # (K,)

    def prob(self, i, j):
        hit = np.flatnonzero((self.pairs[:, 0] == i) & (self.pairs[:, 1] == j))
        return float(self.probs[hit[0]]) if hit.size else 0.0

    def as_dict(self):
        return {(int(i), int(j)): float(p) for (i, j), p in zip(self.pairs, self.probs)}


@dataclass(frozen=True)
class SwapRecord:
    pair: tuple  # 0-based (i, j), or None when no pair could be proposed
    alpha: float
    accepted: bool
    energies: np.ndarray


def _weights(strategy, energies, positions):
    energies = np.asarray(energies, dtype=float)
    n = energies.shape[0]
    if n < 2:
        raise ValueError("swap proposals need at least two levels")
    iu = np.triu_indices(n, 1)
    w = np.asarray(strategy.pair_weights(energies, positions), dtype=float)[iu]
    return np.column_stack(iu), w


def proposal_probs(strategy, energies, positions=None):
    """Normalized proposal distribution over pairs ``i < j``.

    Raises :class:`DegenerateSupport` when every weight is zero.
    """
    pairs, w = _weights(strategy, energies, positions)
    total = w.sum()
    if not total > 0:
        raise DegenerateSupport(f"{strategy}: no pair has positive proposal weight")
    return PairDistribution(pairs, w / total)


def _swapped(values, i, j):
    if values is None:
        return None
    out = np.array(values, copy=True)
    out[[i, j]] = out[[j, i]]
    return out


def log_proposal_ratio(strategy, energies, pair, positions=None):
    """``log p_ij(T_ij x) - log p_ij(x)``."""
    i, j = pair
    fwd = proposal_probs(strategy, energies, positions).prob(i, j)
    rev = proposal_probs(strategy, _swapped(energies, i, j), _swapped(positions, i, j)).prob(i, j)
    if fwd == 0.0:
        return -math.inf
    if rev == 0.0:
        return -math.inf
    return math.log(rev) - math.log(fwd)


def log_swap_accept(strategy, energies, betas, pair, positions=None, general=False):
    i, j = pair
    e_i, e_j = float(energies[i]), float(energies[j])
    log_ratio = 0.0
    if general or not strategy.symmetric:
        log_ratio = log_proposal_ratio(strategy, energies, pair, positions)
    with np.errstate(invalid="ignore"):
        tempered = (float(betas[j]) - float(betas[i])) * (e_i - e_j)
    if math.isnan(tempered):
        # both energies infinite on the same side, or equal temperatures with an infinite gap
        tempered = 0.0
    return min(0.0, log_ratio + tempered)


def swap_accept_prob(strategy, energies, betas, pair, positions=None, general=False):
    """Acceptance probability of exchanging levels ``pair = (i, j)``.

    ``general=True`` forces evaluation of the proposal ratio even for
    symmetric strategies.
    """
    return math.exp(log_swap_accept(strategy, energies, betas, pair, positions, general))


def swap_step(levels, strategy, betas, rng):
    """Propose one pair, accept or reject, and exchange positions only.

    Returns ``(levels, record)``; the input list is not modified.
    """
    energies = np.array([lv.log_p for lv in levels])
    positions = np.array([lv.x for lv in levels]) if strategy.uses_positions else None
    try:
        dist = proposal_probs(strategy, energies, positions)
    except DegenerateSupport:
        return list(levels), SwapRecord(None, 0.0, False, energies)
    cum = np.cumsum(dist.probs)
    k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    k = min(k, len(cum) - 1)
    i, j = (int(v) for v in dist.pairs[k])
    alpha = swap_accept_prob(strategy, energies, betas, (i, j), positions)
    accepted = bool(rng.random() < alpha)
    out = list(levels)
    if accepted:
        a, b = levels[i], levels[j]
        out[i] = replace(a, x=b.x, log_p=b.log_p)
        out[j] = replace(b, x=a.x, log_p=a.log_p)
    return out, SwapRecord((i, j), alpha, accepted, energies)
