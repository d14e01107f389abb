"""Adaptive parallel tempering with state-dependent swap strategies."""
from .exceptions import (
    ConfigError, ConstantColumn, DegenerateSupport, DimensionMismatch, NotPositiveDefinite,
    ParseError, SingularDesign, TargetEvaluationError,
)
from .ladder import LadderState, adapt_ladder, geometric_ladder, maybe_reduce_levels
from .rwm import LevelState, adapt_level, rw_step
from .sampler import SamplerConfig, apt_step, gamma_at, init_state, run
from .swap import (
    AdjacentLevels, EnergyRings, EquiEnergy, RandomPairs, SwapStrategy, parse_strategy,
    proposal_probs, swap_accept_prob, swap_step,
)

__version__ = "0.1.0"
