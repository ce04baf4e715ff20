"""Particle-system engine for reflected CBO and mean-field Langevin dynamics."""

from .consensus import (
    consensus,
    interaction_drift,
    repelling_force,
    repelling_forces,
)
from .models import (
    Ensemble,
    LangevinConfig,
    Schedule,
    ScheduleKind,
    Scheme,
    SolverConfig,
)
from .noise import NoiseStream
from .runner import RunResult, initial_ensemble, iterate_cbo, run_cbo, run_langevin
from .stepping import (
    advance,
    cbo_step_penalty,
    cbo_step_projection,
    langevin_step_projection,
)

__all__ = [
    "Ensemble",
    "LangevinConfig",
    "Schedule",
    "ScheduleKind",
    "Scheme",
    "SolverConfig",
    "NoiseStream",
    "RunResult",
    "consensus",
    "interaction_drift",
    "repelling_force",
    "repelling_forces",
    "advance",
    "cbo_step_penalty",
    "cbo_step_projection",
    "langevin_step_projection",
    "initial_ensemble",
    "iterate_cbo",
    "run_cbo",
    "run_langevin",
]
