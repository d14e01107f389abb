"""Fast invariant probes behind ``aptemper validate``.

Every probe returns ``(passed, detail)``.  Probes look up the swap and
linear-algebra routines through their modules at call time, so a patched
routine is what gets checked.
"""
import math
from collections import OrderedDict

import numpy as np

from . import ladder, linalg, rwm, swap
from .targets import GaussianMixture


def _strategies():
    return [swap.EquiEnergy(), swap.AdjacentLevels(), swap.RandomPairs(),
            swap.EnergyRings([-40.0, -20.0, -10.0, -5.0, -2.0])]


class _TiltedPairs(swap.SwapStrategy):
    """Asymmetric test strategy: favours pairs whose lower level has high energy."""

    name = "tilted"

    def pair_weights(self, energies, positions=None):
        e = np.clip(np.asarray(energies, dtype=float), -50, 50)
        n = e.shape[0]
        return np.exp(0.3 * e)[:, None] * np.ones((n, n))


def random_swap_case(rng, target=None, max_levels=8):
    """Random level count, inverse temperatures and positions with their energies."""
    if target is None:
        target = GaussianMixture([[-3.0, 0.0], [3.0, 1.0], [0.0, 4.0]], 0.7)
    L = int(rng.integers(2, max_levels + 1))
    betas = np.sort(rng.uniform(0.01, 1.0, L))[::-1]
    betas[0] = 1.0
    x = rng.normal(0.0, 3.0, (L, target.dim))
    energies = np.array([target.log_unnorm(p) for p in x])
    return betas, x, energies


def detailed_balance_gap(strategy, energies, betas, pair, general=False):
    """``|log[pi_beta(x) p_ij(x) a_ij(x)] - log[same at T_ij x]|``."""
    i, j = pair
    swapped = energies.copy()
    swapped[[i, j]] = swapped[[j, i]]

    def flux(e):
        try:
            p = swap.proposal_probs(strategy, e).prob(i, j)
        except swap.DegenerateSupport:
            return -math.inf
        if p == 0.0:
            return -math.inf
        a = swap.swap_accept_prob(strategy, e, betas, (i, j), general=general)
        if a == 0.0:
            return -math.inf
        return float(np.dot(betas, e)) + math.log(p) + math.log(a)

    fwd, rev = flux(energies), flux(swapped)
    if fwd == rev == -math.inf:
        return 0.0
    return abs(fwd - rev)


def probe_detailed_balance(n_cases=2000, seed=11, tol=1e-10):
    rng = np.random.default_rng(seed)
    strategies = _strategies()
    worst = 0.0
    for case in range(n_cases):
        betas, _, energies = random_swap_case(rng)
        strategy = strategies[case % len(strategies)]
        L = len(betas)
        i, j = sorted(rng.choice(L, 2, replace=False))
        worst = max(worst, detailed_balance_gap(strategy, energies, betas, (int(i), int(j))))
    return worst < tol, f"max log-flux gap {worst:.3e} over {n_cases} cases"


def probe_general_path(n_cases=500, seed=12, tol=1e-10):
    rng = np.random.default_rng(seed)
    strategy = _TiltedPairs()
    worst = 0.0
    for _ in range(n_cases):
        betas, _, energies = random_swap_case(rng)
        i, j = sorted(rng.choice(len(betas), 2, replace=False))
        worst = max(worst, detailed_balance_gap(strategy, energies, betas, (int(i), int(j))))
    return worst < tol, f"asymmetric strategy, max log-flux gap {worst:.3e}"


def probe_proposal_symmetry(n_cases=1000, seed=13, tol=1e-12):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for case in range(n_cases):
        _, _, energies = random_swap_case(rng)
        for strategy in _strategies():
            L = len(energies)
            i, j = sorted(rng.choice(L, 2, replace=False))
            swapped = energies.copy()
            swapped[[i, j]] = swapped[[j, i]]
            try:
                a = swap.proposal_probs(strategy, energies).prob(i, j)
                b = swap.proposal_probs(strategy, swapped).prob(i, j)
            except swap.DegenerateSupport:
                continue
            worst = max(worst, abs(a - b))
    return worst < tol, f"max |p_ij(x) - p_ij(T_ij x)| = {worst:.3e}"


def probe_shift_invariance(n_cases=1000, seed=14, tol=1e-12):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        betas, _, energies = random_swap_case(rng)
        c = rng.uniform(-100, 100)
        for strategy in _strategies()[:3]:
            p0 = swap.proposal_probs(strategy, energies).probs
            p1 = swap.proposal_probs(strategy, energies + c).probs
            worst = max(worst, float(np.max(np.abs(p0 - p1))))
            i, j = 0, len(betas) - 1
            a0 = swap.swap_accept_prob(strategy, energies, betas, (i, j))
            a1 = swap.swap_accept_prob(strategy, energies + c, betas, (i, j))
            worst = max(worst, abs(a0 - a1))
    return worst < tol, f"max change under energy shift {worst:.3e}"


def probe_permutation_fixed(n_cases=300, seed=15):
    rng = np.random.default_rng(seed)
    target = GaussianMixture([[-3.0, 0.0], [3.0, 1.0]], 1.0)
    for case in range(n_cases):
        betas, x, _ = random_swap_case(rng, target)
        levels = [rwm.init_level(target, p, b) for p, b in zip(x, betas)]
        strategy = _strategies()[case % 4]
        before = sorted(map(tuple, x))
        out, _ = swap.swap_step(levels, strategy, betas, rng)
        if sorted(tuple(lv.x) for lv in out) != before:
            return False, f"multiset of positions changed in case {case}"
    return True, f"position multiset preserved over {n_cases} swap steps"


def probe_rank_one(n_cases=200, seed=16, tol=1e-10):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        d = int(rng.integers(1, 9))
        B = rng.normal(size=(d, d))
        L = linalg.chol_from_dense(B.T @ B + np.eye(d))
        gamma = float(rng.uniform(0, 0.999))
        v = rng.normal(size=d) * rng.uniform(0.1, 10)
        target = (1 - gamma) * (L @ L.T) + gamma * np.outer(v, v)
        M = linalg.chol_rank_one_update(L, gamma, v)
        worst = max(worst, np.linalg.norm(M @ M.T - target) / np.linalg.norm(target))
    return worst < tol, f"max relative reconstruction error {worst:.3e}"


def probe_ladder_fixed_point(n_steps=2000, seed=17):
    rng = np.random.default_rng(seed)
    lad = ladder.geometric_ladder(6, 50.0)
    start = lad.temps.copy()
    for _ in range(n_steps):
        lad = ladder.update_gaps(lad, np.full(lad.L - 1, ladder.TARGET_SWAP), float(rng.uniform(0, 0.999)))
    same = np.array_equal(lad.temps, start)
    return same, "temperatures bit-identical" if same else "temperatures drifted"


def probe_theta_fixed_point(n_steps=2000, seed=18):
    rng = np.random.default_rng(seed)
    target = GaussianMixture([[0.0, 0.0]], 1.0)
    level = rwm.init_level(target, np.zeros(2), 1.0)
    theta = level.theta
    for _ in range(n_steps):
        level = rwm.adapt_level(level, rng.normal(size=2), rwm.TARGET_ACCEPT, float(rng.uniform(0, 0.999)))
    return level.theta == theta, f"theta {theta!r} -> {level.theta!r}"


PROBES = OrderedDict([
    ("detailed_balance", probe_detailed_balance),
    ("general_acceptance_path", probe_general_path),
    ("proposal_symmetry", probe_proposal_symmetry),
    ("energy_shift_invariance", probe_shift_invariance),
    ("permutation_fixed", probe_permutation_fixed),
    ("rank_one_oracle", probe_rank_one),
    ("ladder_fixed_point", probe_ladder_fixed_point),
    ("theta_fixed_point", probe_theta_fixed_point),
])


def run_probes(names=None, echo=print):
    """Run the selected probes, echo one line each, return True iff all pass."""
    ok = True
    for name, probe in PROBES.items():
        if names and name not in names:
            continue
        passed, detail = probe()
        ok &= bool(passed)
        echo(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return ok
