"""Quantum-jump unraveling of time-local master equations whose decay rates
may turn negative, with reverse jumps restoring lost superpositions."""

from .engine import (
    EngineConfig,
    EnsembleRegistry,
    JumpEvent,
    StepOutcome,
    advance_step,
    density_matrix,
    deterministic_step,
    one_step_average_check,
    positive_jump_probability,
    reverse_jump_probability,
    run_simulation,
)
from .errors import (
    ConfigError,
    DimensionMismatch,
    GridMismatch,
    NegativeTime,
    NmqjError,
    NotHermitian,
    ParseError,
    SourceEmpty,
    StepTooLarge,
    UnsupportedModel,
    ZeroNorm,
)
from .linalg import expectation, min_eigenvalue, normalize, outer, phase_equal
from .models import (
    ChannelSpec,
    ModelSpec,
    build_jaynes_cummings,
    build_ladder,
    build_lambda,
    build_vee,
    master_rhs,
    with_constant_rates,
)
from .oracle import (
    AnalyticSolution,
    analytic_density,
    analytic_series,
    integrate_master_equation,
    positivity_scan,
    rate_equation_sign_check,
)
from .reservoir import ConstantRate, LorentzianChannelRate, LorentzianReservoir
from .series import TrajectorySeries, compare_series, read_csv, write_csv

__version__ = "0.1.0"
