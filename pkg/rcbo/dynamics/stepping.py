"""One-step integrators for the CBO and mean-field Langevin particle systems.

All coefficients are frozen at t_k = k·h and the consensus is computed once
from the pre-step positions.
"""

import math

import numpy as np

from ..domain import FeasibleDomain
from ..errors import NonFiniteError
from ..objective import Objective
from .consensus import consensus, interaction_drift, repelling_forces
from .models import Ensemble, LangevinConfig, Scheme, SolverConfig
from .noise import NoiseStream


def _euler_predictor(
    ens: Ensemble, cfg: SolverConfig, xbar: np.ndarray, noise: NoiseStream
) -> np.ndarray:
    x = ens.positions
    t = ens.step * cfg.h
    diff = x - xbar
    drift = -cfg.beta(t) * diff
    if cfg.repelling is not None:
        drift = drift + repelling_forces(x, cfg.repelling(t))
    dw = math.sqrt(cfg.h) * noise.normals(ens.step, x.shape)
    return x + drift * cfg.h + cfg.sigma(t) * diff * dw


def _finish(positions: np.ndarray, ens: Ensemble, h: float) -> Ensemble:
    if not np.all(np.isfinite(positions)):
        raise NonFiniteError(ens.step + 1)
    step = ens.step + 1
    return Ensemble(positions, time=step * h, step=step)


def advance(
    ens: Ensemble,
    cfg: SolverConfig,
    dom: FeasibleDomain,
    xbar: np.ndarray,
    noise: NoiseStream,
) -> Ensemble:
    """Advance one step of ``cfg.scheme`` given the pre-step consensus."""
    predicted = _euler_predictor(ens, cfg, xbar, noise)
    if not np.all(np.isfinite(predicted)):
        raise NonFiniteError(ens.step + 1)
    if cfg.scheme is Scheme.PROJECTION:
        return _finish(dom.project(predicted), ens, cfg.h)
    # the correction acts on the pre-step positions, so particles may leave the domain
    strength = cfg.h / float(cfg.penalty_epsilon or cfg.h)
    return _finish(predicted - strength * dom.penalty_vector(ens.positions), ens, cfg.h)


def _step(
    scheme: Scheme,
    ens: Ensemble,
    cfg: SolverConfig,
    obj: Objective,
    dom: FeasibleDomain,
    rng: NoiseStream,
) -> Ensemble:
    if cfg.scheme is not scheme:
        raise ValueError(f"configuration uses the {cfg.scheme.value} scheme")
    xbar = consensus(ens.positions, obj(ens.positions), cfg.alpha)
    return advance(ens, cfg, dom, xbar, rng)


def cbo_step_penalty(
    ens: Ensemble,
    cfg: SolverConfig,
    obj: Objective,
    dom: FeasibleDomain,
    rng: NoiseStream,
) -> Ensemble:
    """Euler step plus the −(h/ε)π(Y_k) correction taken at the pre-step positions.

    Raises:
        NonFiniteError: If a coordinate becomes NaN or infinite
    """
    return _step(Scheme.PENALTY, ens, cfg, obj, dom, rng)


def cbo_step_projection(
    ens: Ensemble,
    cfg: SolverConfig,
    obj: Objective,
    dom: FeasibleDomain,
    rng: NoiseStream,
) -> Ensemble:
    """Euler step followed by projection of every particle onto the domain.

    Raises:
        NonFiniteError: If a coordinate becomes NaN or infinite
        NonConvergenceError: If a level-set projection fails
    """
    return _step(Scheme.PROJECTION, ens, cfg, obj, dom, rng)


def langevin_step_projection(
    ens: Ensemble,
    cfg: LangevinConfig,
    dom: FeasibleDomain,
    rng: NoiseStream,
) -> Ensemble:
    x = ens.positions
    drift = -cfg.grad_U(x)
    if cfg.grad_V is not None:
        drift = drift + interaction_drift(x, cfg.grad_V)
    noise = cfg.sigma_noise * math.sqrt(cfg.h) * rng.normals(ens.step, x.shape)
    predicted = x + cfg.h * drift + noise
    if not np.all(np.isfinite(predicted)):
        raise NonFiniteError(ens.step + 1)
    return _finish(dom.project(predicted), ens, cfg.h)
