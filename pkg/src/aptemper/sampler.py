"""Adaptive parallel tempering: one step in five phases, and whole runs.

Phase order inside :func:`apt_step`:

1. random-walk move on every level,
2. adaptation of each level's mean, covariance factor and log-scale,
3. one state-dependent swap attempt,
4. log-gap adaptation of the temperature ladder,
5. optional truncation of the ladder (level-count reduction).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import ladder as ladder_mod
from .exceptions import ConfigError
from .rwm import THETA_BOUNDS, adapt_level, init_level, rw_step
from .swap import SwapRecord, parse_strategy, swap_step
from .targets import TargetDensity, build_target

logger = logging.getLogger(__name__)

GAMMA_CAP = 0.999


def gamma_at(n, c=1.0, alpha=0.6):
    """Step size ``c * n ** -alpha`` capped just below one."""
    if n < 1:
        raise ValueError("step-size index starts at 1")
    return min(c * float(n) ** -alpha, GAMMA_CAP)


@dataclass
class SamplerConfig:
    target: object = "peaks20"
    strategy: object = "ee"
    levels_initial: int = 4
    t_max: float = 100.0
    temps: list = None
    n0: int = None
    check_interval: int = 1000
    reduction: str = "off"
    gamma_c: float = 0.5
    gamma_alpha: float = 0.6
    burn_in: int = 0
    main_iters: int = 1000
    seed: int = 0
    theta_bounds: tuple = THETA_BOUNDS
    gap_bounds: tuple = ladder_mod.GAP_BOUNDS
    theta_init: object = None  # scalar, or one value per initial level
    start: list = None
    thin: int = 1
    record: str = "all"
    threads: int = 1
    base_dir: str = field(default=".", repr=False)

    def validate(self):
        """Check every field; raises :class:`ConfigError` naming the first bad key."""
        if not (isinstance(self.levels_initial, (int, np.integer)) and self.levels_initial >= 1):
            raise ConfigError("must be an integer >= 1", field="ladder.levels_initial")
        if self.temps is not None:
            t = np.asarray(self.temps, dtype=float)
            if t.ndim != 1 or t[0] != 1.0 or np.any(np.diff(t) <= 0):
                raise ConfigError("must start at 1 and increase strictly", field="ladder.temps")
        elif self.levels_initial > 1 and not self.t_max > 1:
            raise ConfigError("must exceed 1", field="ladder.t_max")
        if not (isinstance(self.check_interval, (int, np.integer)) and self.check_interval >= 1):
            raise ConfigError("must be a positive integer", field="ladder.check_interval")
        try:
            ladder_mod.parse_reduction(self.reduction)
        except ValueError as exc:
            raise ConfigError(str(exc), field="ladder.reduction") from None
        try:
            parse_strategy(self.strategy)
        except ValueError as exc:
            raise ConfigError(str(exc), field="strategy") from None
        if not 0.5 < self.gamma_alpha < 1.0:
            raise ConfigError("must lie in (0.5, 1)", field="schedule.alpha")
        if not self.gamma_c >= 0:
            raise ConfigError("must be non-negative", field="schedule.c")
        if not (isinstance(self.burn_in, (int, np.integer)) and self.burn_in >= 0):
            raise ConfigError("must be an integer >= 0", field="run.burn_in")
        if not (isinstance(self.main_iters, (int, np.integer)) and self.main_iters >= 1):
            raise ConfigError("must be an integer >= 1", field="run.main_iters")
        if self.n0 is not None and not (isinstance(self.n0, (int, np.integer)) and self.n0 >= 0):
            raise ConfigError("must be an integer >= 0", field="ladder.n0")
        if not (isinstance(self.thin, (int, np.integer)) and self.thin >= 1):
            raise ConfigError("must be a positive integer", field="run.thin")
        if self.record not in ("all", "base", "none"):
            raise ConfigError("must be one of all, base, none", field="run.record")
        if not (isinstance(self.threads, (int, np.integer)) and self.threads >= 1):
            raise ConfigError("must be a positive integer", field="run.threads")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2 ** 64):
            raise ConfigError("must be an unsigned 64-bit integer", field="run.seed")
        if self.theta_init is not None and np.ndim(self.theta_init) > 0:
            L0 = len(self.temps) if self.temps is not None else self.levels_initial
            if len(self.theta_init) != L0:
                raise ConfigError(f"needs one value per level ({L0})", field="run.theta_init")
        lo, hi = self.theta_bounds
        if not lo < hi:
            raise ConfigError("lower bound must be below upper bound", field="run.theta_bounds")
        lo, hi = self.gap_bounds
        if not 0 < lo < hi:
            raise ConfigError("need 0 < lower < upper", field="ladder.gap_bounds")
        return self

    @property
    def burn_in_gate(self):
        return self.burn_in if self.n0 is None else self.n0

    def echo(self):
        out = {}
        for key, value in asdict(self).items():
            if key == "base_dir":
                continue
            if isinstance(value, TargetDensity):
                value = type(value).__name__
            elif key == "strategy":
                value = str(parse_strategy(value))
            elif isinstance(value, np.ndarray):
                value = value.tolist()
            elif isinstance(value, tuple):
                value = list(value)
            out[key] = value
        return out


@dataclass
class SamplerState:
    levels: list
    ladder: ladder_mod.LadderState
    n: int
    level_rngs: list
    swap_rng: np.random.Generator
    target: TargetDensity
    strategy: object
    reduction: tuple

    @property
    def L(self):
        return self.ladder.L

    @property
    def dim(self):
        return self.target.dim


@dataclass
class StepRecord:
    n: int
    gamma: float
    etas: np.ndarray
    accepted: np.ndarray
    swap: SwapRecord
    energies: np.ndarray  # post-swap, one per level
    xi: np.ndarray  # adjacent swap rates fed to the ladder adaptation
    L: int
    temps: np.ndarray
    positions: np.ndarray = None  # post-swap, (L, d)


def resolve_target(config):
    if isinstance(config.target, TargetDensity):
        return config.target
    return build_target(config.target, config.base_dir)


def init_state(config, target=None):
    config.validate()
    if target is None:
        target = resolve_target(config)
    gate = config.burn_in_gate
    if config.temps is not None:
        ladder = ladder_mod.ladder_from_temps(config.temps, gate, config.check_interval, config.gap_bounds)
    else:
        ladder = ladder_mod.geometric_ladder(config.levels_initial, config.t_max, gate,
                                             config.check_interval, config.gap_bounds)
    start = target.default_start() if config.start is None else np.asarray(config.start, dtype=float)
    if start.shape != (target.dim,):
        raise ConfigError(f"start has shape {start.shape}, target dim is {target.dim}", field="run.start")
    thetas = config.theta_init
    if thetas is None or np.ndim(thetas) == 0:
        thetas = [thetas] * ladder.L
    levels = [
        init_level(target, start, beta, th, config.theta_bounds)
        for beta, th in zip(ladder.betas, thetas)
    ]
    children = np.random.SeedSequence(int(config.seed)).spawn(ladder.L + 1)
    rngs = [np.random.Generator(np.random.PCG64(s)) for s in children]
    return SamplerState(
        levels=levels, ladder=ladder, n=0, level_rngs=rngs[:-1], swap_rng=rngs[-1],
        target=target, strategy=parse_strategy(config.strategy),
        reduction=ladder_mod.parse_reduction(config.reduction),
    )


def _advance(level, target, rng, gamma):
    res = rw_step(level, target, rng)
    moved = replace(level, x=res.x, log_p=res.log_p)
    return adapt_level(moved, res.x, res.eta, gamma), res.eta, res.accepted


def apt_step(state, config, executor=None, keep_positions=False):
    """Advance ``state`` by one full step; returns ``(new_state, StepRecord)``."""
    n = state.n + 1
    gamma = gamma_at(n, config.gamma_c, config.gamma_alpha) if config.gamma_c > 0 else 0.0
    L = state.L
    target = state.target

    # random walk + per-level adaptation; levels only touch their own rng
    if executor is not None and L > 1:
        results = list(executor.map(
            lambda k: _advance(state.levels[k], target, state.level_rngs[k], gamma), range(L)))
    else:
        results = [_advance(state.levels[k], target, state.level_rngs[k], gamma) for k in range(L)]
    levels = [r[0] for r in results]
    etas = np.array([r[1] for r in results])
    accepted = np.array([r[2] for r in results])

    ladder = state.ladder
    if L > 1:
        levels, record = swap_step(levels, state.strategy, ladder.betas, state.swap_rng)
        energies = np.array([lv.log_p for lv in levels])
        xi = ladder_mod.swap_rates(ladder, energies)
        if gamma > 0.0:
            ladder = ladder_mod.update_gaps(ladder, xi, gamma)
    else:
        energies = np.array([lv.log_p for lv in levels])
        record = SwapRecord(None, math.nan, False, energies)
        xi = np.empty(0)

    variant, eps = state.reduction
    thetas = np.array([lv.theta for lv in levels])
    ladder = ladder_mod.maybe_reduce_levels(ladder, thetas, target.dim, n, variant, eps)
    if ladder.L < L:
        logger.debug("step %d: ladder reduced from %d to %d levels", n, L, ladder.L)
    levels = [replace(lv, beta=float(b)) for lv, b in zip(levels[:ladder.L], ladder.betas)]

    positions = np.array([lv.x for lv in levels]) if keep_positions else None
    new_state = replace(state, levels=levels, ladder=ladder, n=n,
                        level_rngs=state.level_rngs[:ladder.L])
    step = StepRecord(n, gamma, etas, accepted, record, energies, xi, ladder.L,
                      ladder.temps.copy(), positions)
    return new_state, step


@dataclass
class RunTrace:
    """Main-phase output of a run.

    ``base`` holds every main-phase position of the level-1 chain
    (unthinned); the ``rows`` lists hold thinned per-level records.
    """

    base: np.ndarray
    base_energy: np.ndarray
    trace_rows: list
    swap_rows: list
    ladder_rows: list
    dim: int
    L0: int
    rw_accept_sum: np.ndarray
    rw_accept_count: np.ndarray
    swap_attempts: int
    swap_accepts: int
    final_state: SamplerState = None

    def __len__(self):
        return self.base.shape[0]


def run(config, target=None, progress=None):
    """Burn-in plus main phase; returns ``(trace, summary)``.

    ``progress``, when given, is called as ``progress(n, state)`` after every step.
    """
    from .bench import summarize_run

    state = init_state(config, target)
    target = state.target
    d = target.dim
    L0 = state.L
    n_main = config.main_iters
    base = np.empty((n_main, d))
    base_energy = np.empty(n_main)
    trace_rows, swap_rows, ladder_rows = [], [], []
    acc_sum = np.zeros(L0)
    acc_cnt = np.zeros(L0, dtype=int)
    swap_attempts = swap_accepts = 0
    keep = config.record == "all"

    executor = ThreadPoolExecutor(max_workers=config.threads) if config.threads > 1 else None
    try:
        total = config.burn_in + n_main
        for _ in range(total):
            state, step = apt_step(state, config, executor, keep_positions=keep)
            if progress is not None:
                progress(step.n, state)
            m = step.n - config.burn_in - 1
            if m < 0:
                continue
            base[m] = state.levels[0].x
            base_energy[m] = state.levels[0].log_p
            Lr = len(step.accepted)
            acc_sum[:Lr] += step.accepted
            acc_cnt[:Lr] += 1
            if step.swap.pair is not None or Lr > 1:
                swap_attempts += 1
                swap_accepts += int(step.swap.accepted)
            if m % config.thin:
                continue
            if keep:
                for lvl in range(step.L):
                    trace_rows.append((step.n, lvl + 1, step.positions[lvl], step.energies[lvl]))
            elif config.record == "base":
                trace_rows.append((step.n, 1, base[m], base_energy[m]))
            if step.swap.pair is not None:
                i, j = step.swap.pair
                swap_rows.append((step.n, i + 1, j + 1, step.swap.alpha, int(step.swap.accepted)))
            ladder_rows.append((step.n, step.L, step.temps))
    finally:
        if executor is not None:
            executor.shutdown()

    trace = RunTrace(base, base_energy, trace_rows, swap_rows, ladder_rows, d, L0,
                     acc_sum, acc_cnt, swap_attempts, swap_accepts, state)
    return trace, summarize_run(trace, target)
