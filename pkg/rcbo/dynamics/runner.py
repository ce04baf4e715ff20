"""Run loops built on the one-step integrators."""

import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass

import numpy as np

from ..domain import FeasibleDomain
from ..objective import Objective
from .consensus import consensus
from .models import Ensemble, LangevinConfig, SolverConfig
from .noise import NoiseStream
from .stepping import advance, langevin_step_projection

_logging = logging.getLogger(__name__)


@dataclass
class RunResult:
    ensemble: Ensemble
    consensus: np.ndarray
    value: float
    trace: np.ndarray | None = None


def initial_ensemble(
    dom: FeasibleDomain, particles: int, noise: NoiseStream
) -> Ensemble:
    """Uniform sample on the domain drawn from the replicate's init stream."""
    return Ensemble(dom.sample_uniform(noise.init_generator(), particles))


def iterate_cbo(
    cfg: SolverConfig,
    obj: Objective,
    dom: FeasibleDomain,
    replicate: int = 0,
    initial: Ensemble | None = None,
) -> Iterator[tuple[Ensemble, np.ndarray]]:
    """Yield ``(ensemble, consensus)`` for the initial state and after each step.

    The objective is evaluated once per step; the consensus yielded with an
    ensemble is the one the next step drifts toward.
    """
    if dom.dimension != obj.dimension:
        raise ValueError(
            f"domain dimension {dom.dimension} does not match "
            f"objective '{obj.name}' dimension {obj.dimension}"
        )
    noise = NoiseStream(cfg.seed, replicate)
    ens = initial if initial is not None else initial_ensemble(dom, cfg.particles, noise)
    debug = _logging.isEnabledFor(logging.DEBUG)

    xbar = consensus(ens.positions, obj(ens.positions), cfg.alpha)
    yield ens, xbar
    for _ in range(cfg.steps):
        ens = advance(ens, cfg, dom, xbar, noise)
        xbar = consensus(ens.positions, obj(ens.positions), cfg.alpha)
        if debug:
            _logging.debug(
                f"replicate {replicate} step {ens.step}: consensus {xbar.tolist()} "
                f"f={float(obj(xbar)):.6g}"
            )
        yield ens, xbar


def run_cbo(
    cfg: SolverConfig,
    obj: Objective,
    dom: FeasibleDomain,
    replicate: int = 0,
    record_trace: bool = False,
) -> RunResult:
    """Run K steps from a uniform initial sample and return the final consensus.

    With ``record_trace`` the consensus of every state, initial one included,
    is stacked into a (K + 1, d) array.

    Raises:
        NonFiniteError: If the ensemble blows up
        NonConvergenceError: If a level-set projection fails
    """
    trace: list[np.ndarray] = []
    ens, xbar = None, None
    for ens, xbar in iterate_cbo(cfg, obj, dom, replicate=replicate):
        if record_trace:
            trace.append(xbar)
    assert ens is not None and xbar is not None
    return RunResult(
        ensemble=ens,
        consensus=xbar,
        value=float(obj(xbar)),
        trace=np.vstack(trace) if record_trace else None,
    )


def run_langevin(
    cfg: LangevinConfig,
    dom: FeasibleDomain,
    replicate: int = 0,
    observer: Callable[[Ensemble], None] | None = None,
    initial: Ensemble | None = None,
) -> Ensemble:
    """Iterate the projected Langevin step ``cfg.steps`` times.

    ``observer`` sees the initial ensemble and every later state.
    """
    noise = NoiseStream(cfg.seed, replicate)
    ens = initial if initial is not None else initial_ensemble(dom, cfg.particles, noise)
    if observer is not None:
        observer(ens)
    for _ in range(cfg.steps):
        ens = langevin_step_projection(ens, cfg, dom, noise)
        if observer is not None:
            observer(ens)
    return ens
