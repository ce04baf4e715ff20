"""rcbo - reflected consensus-based optimization on constrained domains.

This module provides the main exports for the rcbo package.
The numerical engine lives in ``rcbo.dynamics``, the replicated experiments
in ``rcbo.experiment`` and the command line in ``rcbo.commands``.
"""

import logging
import sys

# Configuration
from .config import (
    ConfigError,
    domain_from_settings,
    load_config,
    objective_from_settings,
    solver_from_settings,
)

# Error types and formatting
from .errors import (
    DecayBoundViolation,
    DegenerateGradientError,
    DimensionMismatch,
    DomainError,
    InsufficientReplicas,
    NonConvergenceError,
    NonFiniteError,
    NumericalError,
    OracleNonConvergence,
    RcboError,
    RejectionBudgetExceeded,
    format_error,
    format_field_error,
)

# Feasible domains
from .domain import Ball, Box, FeasibleDomain, HeartRegion, LevelSet

# Objectives
from .objective import (
    MertonParams,
    Objective,
    ObservationSet,
    generate_observations,
    get_objective,
    merton_loss,
    merton_price,
)

# Engine
from .dynamics import (
    Ensemble,
    LangevinConfig,
    NoiseStream,
    Schedule,
    Scheme,
    SolverConfig,
    consensus,
    run_cbo,
    run_langevin,
)

# Path helpers
from .paths import get_output_dir

_logging = logging.getLogger(__name__)

QUIET = -1
NORMAL = 0
DEBUG = 1


def setup_logging(verbosity: int = NORMAL):
    """Configure logging for the application.

    ``verbosity`` is -1 for warnings only, 0 for progress messages and 1 for
    per-step diagnostics. Calling it again only adjusts the level.
    """
    if not _logging.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        _logging.addHandler(handler)
    if verbosity >= DEBUG:
        _logging.setLevel(logging.DEBUG)
    elif verbosity <= QUIET:
        _logging.setLevel(logging.WARNING)
    else:
        _logging.setLevel(logging.INFO)


__all__ = [
    # Logging
    "setup_logging",
    "QUIET",
    "NORMAL",
    "DEBUG",
    # Configuration
    "ConfigError",
    "load_config",
    "domain_from_settings",
    "objective_from_settings",
    "solver_from_settings",
    # Errors
    "RcboError",
    "DimensionMismatch",
    "DomainError",
    "NumericalError",
    "NonFiniteError",
    "NonConvergenceError",
    "RejectionBudgetExceeded",
    "DegenerateGradientError",
    "OracleNonConvergence",
    "InsufficientReplicas",
    "DecayBoundViolation",
    "format_error",
    "format_field_error",
    # Domains
    "FeasibleDomain",
    "Ball",
    "Box",
    "LevelSet",
    "HeartRegion",
    # Objectives
    "Objective",
    "MertonParams",
    "ObservationSet",
    "generate_observations",
    "get_objective",
    "merton_loss",
    "merton_price",
    # Engine
    "Ensemble",
    "LangevinConfig",
    "NoiseStream",
    "Schedule",
    "Scheme",
    "SolverConfig",
    "consensus",
    "run_cbo",
    "run_langevin",
    # Paths
    "get_output_dir",
]
