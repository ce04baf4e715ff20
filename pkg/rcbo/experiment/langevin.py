"""Invariant-measure check for the projected mean-field Langevin integrator.

The oracle is the self-consistent density ρ ∝ exp(−(2/σ²)(U + V∗ρ)) on an
interval, found by damped fixed-point iteration on a midpoint grid. The
particle system is run past a burn-in, snapshots are pooled into a histogram,
and the L¹ distance between histogram and oracle bin masses is compared with a
tolerance.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import wasserstein_distance

from ..domain import Box
from ..dynamics import Ensemble, LangevinConfig, run_langevin
from ..errors import OracleNonConvergence
from .models import InvariantReport

_logging = logging.getLogger(__name__)

GRID_POINTS = 2048
BINS = 64
L1_TOLERANCE = 0.1
ORACLE_TOL = 1e-10
ORACLE_MAX_ITERS = 10_000
ORACLE_DAMPING = 0.5


@dataclass
class OracleDensity:
    grid: np.ndarray
    density: np.ndarray
    dx: float
    iterations: int

    def bin_masses(self, bins: int) -> np.ndarray:
        """Probability mass per equal-width bin; grid points split evenly across bins."""
        if len(self.grid) % bins:
            raise ValueError(f"{len(self.grid)} grid points do not split into {bins} bins")
        return (self.density * self.dx).reshape(bins, -1).sum(axis=1)


def invariant_density(
    U: Callable[[np.ndarray], np.ndarray],
    V: Callable[[np.ndarray], np.ndarray] | None,
    sigma: float,
    lower: float,
    upper: float,
    points: int = GRID_POINTS,
    damping: float = ORACLE_DAMPING,
    tol: float = ORACLE_TOL,
    max_iters: int = ORACLE_MAX_ITERS,
) -> OracleDensity:
    """Solve ρ = exp(−(2/σ²)(U + V∗ρ)) / Z on [lower, upper] by damped iteration.

    Args:
        U: External potential, evaluated on a 1-D array of grid points
        V: Interaction potential evaluated on differences, or None
        sigma: Noise level, positive
        lower: Left end of the interval
        upper: Right end of the interval
        points: Number of midpoint grid cells
        damping: Weight of the new iterate, in (0, 1]
        tol: Max-norm residual required for convergence
        max_iters: Iteration budget

    Raises:
        OracleNonConvergence: If the residual is still above ``tol`` after ``max_iters``
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    dx = (upper - lower) / points
    grid = lower + dx * (np.arange(points) + 0.5)
    beta_eff = 2.0 / sigma**2
    external = U(grid)
    kernel = None if V is None else V(grid[:, None] - grid[None, :]) * dx

    def gibbs(potential: np.ndarray) -> np.ndarray:
        # shift before exponentiating; normalisation absorbs it
        weights = np.exp(-beta_eff * (potential - potential.min()))
        return weights / (weights.sum() * dx)

    rho = gibbs(external)
    if kernel is None:
        return OracleDensity(grid, rho, dx, 1)

    for iteration in range(1, max_iters + 1):
        target = gibbs(external + kernel @ rho)
        residual = float(np.max(np.abs(target - rho)))
        rho = (1 - damping) * rho + damping * target
        if residual <= tol:
            return OracleDensity(grid, rho, dx, iteration)
    raise OracleNonConvergence(
        f"fixed-point residual {residual:.3g} above {tol:g} after {max_iters} iterations"
    )


@dataclass
class LangevinPreset:
    """A 1-D test configuration with its run lengths."""

    name: str
    U: Callable[[np.ndarray], np.ndarray]
    grad_U: Callable[[np.ndarray], np.ndarray]
    sigma: float
    lower: float
    upper: float
    h: float
    particles: int
    burn_in: int
    thin: int
    samples: int
    V: Callable[[np.ndarray], np.ndarray] | None = None
    grad_V: Callable[[np.ndarray], np.ndarray] | None = None

    def config(self, seed: int = 0) -> LangevinConfig:
        return LangevinConfig(
            sigma_noise=self.sigma,
            h=self.h,
            steps=0,
            particles=self.particles,
            seed=seed,
            grad_U=self.grad_U,
            grad_V=self.grad_V,
            U=self.U,
            V=self.V,
        )

    def domain(self) -> Box:
        return Box(np.array([self.lower]), np.array([self.upper]))


INTERACTION_STRENGTH = 0.2


def _quartic_well(x: np.ndarray) -> np.ndarray:
    return (x**2 - 1.0) ** 2


def _quartic_well_grad(x: np.ndarray) -> np.ndarray:
    return 4.0 * x * (x**2 - 1.0)


def _attraction(z: np.ndarray) -> np.ndarray:
    return 0.5 * INTERACTION_STRENGTH * z**2


def _attraction_grad(z: np.ndarray) -> np.ndarray:
    return INTERACTION_STRENGTH * z


PRESETS: dict[str, LangevinPreset] = {
    "quadratic": LangevinPreset(
        name="quadratic",
        U=lambda x: x**2,
        grad_U=lambda x: 2.0 * x,
        sigma=1.0,
        lower=-1.0,
        upper=1.0,
        h=1e-3,
        particles=10_000,
        burn_in=2_000,
        thin=500,
        samples=200_000,
    ),
    "flat": LangevinPreset(
        name="flat",
        U=lambda x: 0.5 * x**2,
        grad_U=lambda x: x,
        sigma=2.0,
        lower=-1.0,
        upper=1.0,
        h=1e-4,
        particles=10_000,
        burn_in=10_000,
        thin=2_000,
        samples=200_000,
    ),
    "double-well": LangevinPreset(
        name="double-well",
        U=_quartic_well,
        grad_U=_quartic_well_grad,
        sigma=1.0,
        lower=-1.5,
        upper=1.5,
        h=2e-3,
        particles=400,
        burn_in=2_500,
        thin=500,
        samples=24_000,
        V=_attraction,
        grad_V=_attraction_grad,
    ),
}


def get_preset(name: str) -> LangevinPreset:
    if name not in PRESETS:
        raise ValueError(
            f"unknown Langevin preset '{name}', expected one of {', '.join(PRESETS)}"
        )
    return PRESETS[name]


def langevin_invariant_check(
    cfg: LangevinConfig,
    dom: Box,
    burn_in: int,
    samples: int,
    thin: int = 1,
    bins: int = BINS,
    tolerance: float = L1_TOLERANCE,
    preset: str = "custom",
) -> InvariantReport:
    """Compare the long-run particle histogram with the fixed-point oracle.

    ``cfg.steps`` is ignored: the run lasts ``burn_in`` steps plus enough
    snapshots, ``thin`` steps apart, to pool ``samples`` positions. The W₁
    distance to the oracle is recorded at every snapshot time from t = 0.

    Raises:
        ValueError: If the domain is not a 1-D interval or U is missing
        OracleNonConvergence: If the oracle iteration fails
    """
    if dom.dimension != 1:
        raise ValueError("the invariant-measure check needs a 1-D interval domain")
    if cfg.U is None:
        raise ValueError("the oracle needs the potential U, not only its gradient")
    if burn_in < 0 or samples < 1 or thin < 1:
        raise ValueError("burn_in must be >= 0, samples and thin >= 1")

    lower, upper = float(dom.lower[0]), float(dom.upper[0])
    oracle = invariant_density(cfg.U, cfg.V, cfg.sigma_noise, lower, upper)
    _logging.info(f"oracle converged after {oracle.iterations} iteration(s)")

    snapshots = math.ceil(samples / cfg.particles)
    run_cfg = replace(cfg, steps=burn_in + snapshots * thin)
    oracle_weights = oracle.density * oracle.dx

    pooled: list[np.ndarray] = []
    w1_times: list[float] = []
    w1_values: list[float] = []

    def observe(ens: Ensemble) -> None:
        values = ens.positions[:, 0]
        if ens.step % thin == 0:
            w1_times.append(ens.time)
            w1_values.append(
                wasserstein_distance(values, oracle.grid, v_weights=oracle_weights)
            )
        if ens.step > burn_in and (ens.step - burn_in) % thin == 0:
            pooled.append(values.copy())

    run_langevin(run_cfg, dom, observer=observe)

    positions = np.concatenate(pooled)[:samples]
    edges = np.linspace(lower, upper, bins + 1)
    counts, _ = np.histogram(positions, bins=edges)
    empirical = counts / counts.sum()
    expected = oracle.bin_masses(bins)
    l1 = float(np.abs(empirical - expected).sum())

    report = InvariantReport(
        preset=preset,
        l1_distance=l1,
        tolerance=tolerance,
        bin_edges=edges,
        empirical_mass=empirical,
        oracle_mass=expected,
        w1_times=np.array(w1_times),
        w1_values=np.array(w1_values),
        oracle_iterations=oracle.iterations,
        samples=len(positions),
    )
    level = logging.INFO if report.passed else logging.WARNING
    _logging.log(level, f"{preset}: L1 histogram distance {l1:.4f} (tolerance {tolerance})")
    return report


def run_preset(name: str, seed: int = 0) -> InvariantReport:
    preset = get_preset(name)
    return langevin_invariant_check(
        preset.config(seed),
        preset.domain(),
        burn_in=preset.burn_in,
        samples=preset.samples,
        thin=preset.thin,
        preset=name,
    )
