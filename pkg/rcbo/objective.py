"""Benchmark objectives and the Merton jump-diffusion inverse problem.

Benchmark functions take arrays whose last axis holds the coordinates, so the
same function evaluates a single point ``(d,)`` or a whole ensemble ``(n, d)``.

The Merton forward map is the closed-form Poisson series for a call struck at 1
under an exponential jump-diffusion with unit jump intensity and zero discount.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.special import gammaln, ndtr, xlogy

from .domain import HeartRegion
from .errors import DimensionMismatch, DomainError

_logging = logging.getLogger(__name__)

HORIZON = 3.0
JUMP_INTENSITY = 1.0
DISCOUNT_RATE = 0.0
SERIES_MAX_TERMS = 60
SERIES_TOL = 1e-16
DEFAULT_LAMBDA_REG = 1e-6
DEFAULT_NOISE_SCALE = 1e-3

OBSERVATION_TIMES = 0.3 * np.arange(10)
OBSERVATION_POINTS = 0.8 + 0.1 * np.arange(5)

SEARCH_LOWER = np.array([0.0, -1.0, 0.0])
SEARCH_UPPER = np.array([1.0, 1.0, 1.0])


@dataclass(frozen=True, eq=False)
class Objective:
    """Scalar objective on the feasible set, evaluated batch-wise."""

    name: str
    dimension: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    known_minimizer: np.ndarray | None = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        if self.known_minimizer is not None:
            minimizer = np.array(self.known_minimizer, dtype=float)
            if minimizer.shape != (self.dimension,):
                raise ValueError("known_minimizer must match the objective dimension")
            minimizer.setflags(write=False)
            object.__setattr__(self, "known_minimizer", minimizer)

    def __call__(self, x) -> float | np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0 or arr.shape[-1] != self.dimension:
            raise DimensionMismatch(
                f"objective '{self.name}' expects dimension {self.dimension}"
            )
        values = np.asarray(self.evaluate(arr), dtype=float)
        return float(values) if arr.ndim == 1 else values


def ackley_translated(x) -> np.ndarray:
    """Two-dimensional Ackley function with its global minimum moved to (2, 2)."""
    x = np.asarray(x, dtype=float)
    u, v = x[..., 0] - 2.0, x[..., 1] - 2.0
    return (
        -20.0 * np.exp(-0.2 * np.sqrt(0.5 * (u**2 + v**2)))
        - np.exp(0.5 * (np.cos(2 * np.pi * u) + np.cos(2 * np.pi * v)))
        + 20.0
        + np.e
    )


def rastrigin(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    return 10.0 * d + np.sum(x**2 - 10.0 * np.cos(2 * np.pi * x), axis=-1)


def rosenbrock2(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    a, b = x[..., 0], x[..., 1]
    return (1.0 - a) ** 2 + 100.0 * (b - a**2) ** 2


def townsend(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    a, b = x[..., 0], x[..., 1]
    return -np.cos((a - 0.1) * b) ** 2 - a * np.sin(3 * a + b)


def quadratic(x, center: np.ndarray) -> np.ndarray:
    """Strongly convex |x − center|²."""
    x = np.asarray(x, dtype=float)
    return np.sum((x - center) ** 2, axis=-1)


def constant(x, value: float = 1.0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.full(x.shape[:-1], value)


# Module-level cache for the dense-grid Townsend reference
_townsend_reference_cache: dict[int, np.ndarray] = {}


def townsend_reference_minimizer(resolution: int = 2000) -> np.ndarray:
    """Minimizer of townsend over the heart region by dense-grid search.

    The grid covers the heart's bounding box [-3, 3]² and is evaluated in row
    chunks to keep memory flat. Results are cached per resolution.
    """
    if resolution in _townsend_reference_cache:
        return _townsend_reference_cache[resolution].copy()

    heart = HeartRegion()
    lower, upper = heart.bounding_box()
    xs = np.linspace(lower[0], upper[0], resolution)
    ys = np.linspace(lower[1], upper[1], resolution)

    best_value = np.inf
    best_point = np.zeros(2)
    chunk = max(1, 500_000 // resolution)
    for start in range(0, resolution, chunk):
        gx, gy = np.meshgrid(xs[start : start + chunk], ys, indexing="ij")
        points = np.column_stack((gx.ravel(), gy.ravel()))
        points = points[heart.contains(points)]
        if len(points) == 0:
            continue
        values = townsend(points)
        k = int(np.argmin(values))
        if values[k] < best_value:
            best_value = float(values[k])
            best_point = points[k]

    _logging.debug(
        f"townsend reference at {best_point.tolist()} (value {best_value:.12g})"
    )
    _townsend_reference_cache[resolution] = best_point.copy()
    return best_point.copy()


def clear_cache() -> None:
    """Drop the cached Townsend reference minimizers."""
    _townsend_reference_cache.clear()


@dataclass(frozen=True)
class MertonParams:
    """Diffusion volatility, jump log-mean and jump log-std.

    Fields may be floats or broadcastable arrays; the series only depends on
    sigma and gamma through their squares.
    """

    sigma: float | np.ndarray
    m: float | np.ndarray
    gamma: float | np.ndarray

    def __post_init__(self):
        for name in ("sigma", "m", "gamma"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.sigma, self.m, self.gamma], dtype=float)

    @classmethod
    def from_array(cls, values) -> "MertonParams":
        arr = np.asarray(values, dtype=float)
        if arr.shape[-1] != 3:
            raise DimensionMismatch("Merton parameters need exactly 3 components")
        return cls(sigma=arr[..., 0], m=arr[..., 1], gamma=arr[..., 2])

    def in_search_box(self) -> bool:
        arr = np.stack(np.broadcast_arrays(self.sigma, self.m, self.gamma), axis=-1)
        return bool(np.all((arr >= SEARCH_LOWER) & (arr <= SEARCH_UPPER)))

    @property
    def jump_compensator(self) -> float | np.ndarray:
        """b = exp(m + gamma²/2) − 1."""
        return np.expm1(self.m + 0.5 * np.square(self.gamma))


def _normal_cdf(numerator: np.ndarray, scale: np.ndarray) -> np.ndarray:
    # Φ(±∞) convention when the conditional variance vanishes
    numerator, scale = np.broadcast_arrays(numerator, scale)
    positive = scale > 0
    z = np.divide(numerator, scale, out=np.zeros(numerator.shape), where=positive)
    return np.where(positive, ndtr(z), (numerator > 0).astype(float))


def _poisson_weight(j: int, mean: np.ndarray) -> np.ndarray:
    return np.exp(xlogy(j, mean) - mean - gammaln(j + 1))


def merton_series(
    tau,
    x,
    sigma,
    m,
    gamma,
    max_terms: int = SERIES_MAX_TERMS,
    tol: float = SERIES_TOL,
) -> np.ndarray:
    """Sum the Poisson-mixture call series for time-to-maturity ``tau``.

    All arguments broadcast against each other. The first leg's Poisson
    weights have mean λτe^{m+γ²/2} and the second leg's λτ; summation stops
    once both are past their modes and the combined weight drops below ``tol``
    or after ``max_terms`` terms.
    """
    tau, x, sigma, m, gamma = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (tau, x, sigma, m, gamma))
    )
    lam = JUMP_INTENSITY
    gamma_sq = gamma**2
    var_rate = sigma**2
    kappa = m + 0.5 * gamma_sq
    b = np.expm1(kappa)
    log_x = np.log(x)
    base_mean = lam * tau
    jump_mean = base_mean * np.exp(kappa)
    discount = np.exp(-DISCOUNT_RATE * tau)
    mode = float(np.max(np.maximum(base_mean, jump_mean), initial=0.0))

    total = np.zeros(tau.shape)
    for j in range(max_terms):
        scale = np.sqrt(var_rate * tau + j * gamma_sq)
        d_plus = log_x + (0.5 * var_rate - lam * b) * tau + j * (m + gamma_sq)
        d_minus = log_x + (-0.5 * var_rate - lam * b) * tau + j * m
        w_jump = _poisson_weight(j, jump_mean)
        w_base = _poisson_weight(j, base_mean) * discount
        total += x * w_jump * _normal_cdf(d_plus, scale) - w_base * _normal_cdf(
            d_minus, scale
        )
        if j >= mode and np.all(x * w_jump + w_base < tol):
            break
    return total


def merton_price(
    t,
    x,
    theta: MertonParams,
    horizon: float = HORIZON,
    max_terms: int = SERIES_MAX_TERMS,
) -> float | np.ndarray:
    """Closed-form value u(t, x; θ) of the call with payoff max(x − 1, 0) at ``horizon``.

    Raises:
        DomainError: If any x ≤ 0 or t lies outside [0, horizon]
    """
    t_arr = np.asarray(t, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("x must be positive")
    if np.any((t_arr < 0) | (t_arr > horizon)):
        raise DomainError(f"t must lie in [0, {horizon}]")
    value = merton_series(
        horizon - t_arr, x_arr, theta.sigma, theta.m, theta.gamma, max_terms=max_terms
    )
    return float(value) if value.ndim == 0 else value


def merton_monte_carlo(
    t: float,
    x: float,
    theta: MertonParams,
    rng: np.random.Generator,
    paths: int = 1_000_000,
    horizon: float = HORIZON,
) -> tuple[float, float]:
    """Monte Carlo price and standard error from exact terminal sampling."""
    tau = horizon - t
    lam = JUMP_INTENSITY
    sigma, m, gamma = float(theta.sigma), float(theta.m), float(theta.gamma)
    b = float(np.expm1(m + 0.5 * gamma**2))
    jumps = rng.poisson(lam * tau, size=paths)
    log_s = (
        np.log(x)
        + (-0.5 * sigma**2 - lam * b) * tau
        + sigma * np.sqrt(tau) * rng.standard_normal(paths)
        + jumps * m
        + np.sqrt(jumps) * gamma * rng.standard_normal(paths)
    )
    payoff = np.exp(-DISCOUNT_RATE * tau) * np.maximum(np.exp(log_s) - 1.0, 0.0)
    return float(payoff.mean()), float(payoff.std(ddof=1) / np.sqrt(paths))


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Noisy observations of the forward map on the fixed (t_i, x_j) grid."""

    times: np.ndarray
    points: np.ndarray
    u_true: np.ndarray
    u_noisy: np.ndarray
    seed: int | None = None
    noise_scale: float = DEFAULT_NOISE_SCALE

    def __post_init__(self):
        shape = (len(self.times), len(self.points))
        if self.u_true.shape != shape or self.u_noisy.shape != shape:
            raise ValueError(f"observation values must have shape {shape}")

    def to_frame(self) -> pd.DataFrame:
        ii, jj = np.meshgrid(
            np.arange(1, len(self.times) + 1),
            np.arange(1, len(self.points) + 1),
            indexing="ij",
        )
        tt, xx = np.meshgrid(self.times, self.points, indexing="ij")
        return pd.DataFrame(
            {
                "i": ii.ravel(),
                "j": jj.ravel(),
                "t": tt.ravel(),
                "x": xx.ravel(),
                "u_true": self.u_true.ravel(),
                "u_noisy": self.u_noisy.ravel(),
            }
        )

    def to_csv(self, path: Path) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    @classmethod
    def from_csv(cls, path: Path) -> "ObservationSet":
        frame = pd.read_csv(path, float_precision="round_trip").sort_values(["i", "j"])
        n_t, n_x = int(frame["i"].max()), int(frame["j"].max())
        times = frame.loc[frame["j"] == 1, "t"].to_numpy()
        points = frame.loc[frame["i"] == 1, "x"].to_numpy()
        return cls(
            times=times,
            points=points,
            u_true=frame["u_true"].to_numpy().reshape(n_t, n_x),
            u_noisy=frame["u_noisy"].to_numpy().reshape(n_t, n_x),
        )


def generate_observations(
    theta_true: MertonParams,
    seed: int,
    noise_scale: float = DEFAULT_NOISE_SCALE,
) -> ObservationSet:
    """Synthetic data û = u + ε with ε ~ N(0, noise_scale · u) (variance form).

    ``noise_scale=0`` returns the exact forward map.
    """
    if not theta_true.in_search_box():
        raise DomainError("theta_true must lie in the parameter search box")
    if noise_scale < 0:
        raise ValueError("noise_scale must be nonnegative")
    u_true = np.asarray(
        merton_price(OBSERVATION_TIMES[:, None], OBSERVATION_POINTS[None, :], theta_true)
    )
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(u_true.shape) * np.sqrt(
        noise_scale * np.maximum(u_true, 0.0)
    )
    return ObservationSet(
        times=OBSERVATION_TIMES.copy(),
        points=OBSERVATION_POINTS.copy(),
        u_true=u_true,
        u_noisy=u_true + noise,
        seed=seed,
        noise_scale=noise_scale,
    )


def merton_loss_batch(
    thetas: np.ndarray,
    obs: ObservationSet,
    lambda_reg: float = DEFAULT_LAMBDA_REG,
) -> np.ndarray:
    """Tikhonov loss for every row of ``thetas`` (shape (..., 3))."""
    thetas = np.asarray(thetas, dtype=float)
    sigma = thetas[..., 0, None, None]
    m = thetas[..., 1, None, None]
    gamma = thetas[..., 2, None, None]
    tau = HORIZON - obs.times[:, None]
    u = merton_series(tau, obs.points[None, :], sigma, m, gamma)
    misfit = np.sum((u - obs.u_noisy) ** 2, axis=(-2, -1))
    return misfit + lambda_reg * np.linalg.norm(thetas, axis=-1)


def merton_loss(
    theta: MertonParams,
    obs: ObservationSet,
    lambda_reg: float = DEFAULT_LAMBDA_REG,
) -> float:
    """Σᵢⱼ |u(t_i, x_j; θ) − û_ij|² + λ_reg·|θ|₂."""
    if lambda_reg < 0:
        raise ValueError("lambda_reg must be nonnegative")
    return float(merton_loss_batch(theta.as_array(), obs, lambda_reg))


OBJECTIVE_NAMES = (
    "ackley",
    "rastrigin",
    "rosenbrock",
    "townsend",
    "merton",
    "quadratic",
    "constant",
)

_FIXED_DIMENSION = {"ackley": 2, "rosenbrock": 2, "townsend": 2, "merton": 3}


def get_objective(
    name: str,
    dimension: int | None = None,
    *,
    observations: ObservationSet | None = None,
    theta_true: MertonParams | None = None,
    lambda_reg: float = DEFAULT_LAMBDA_REG,
    center=None,
) -> Objective:
    """Build a named objective.

    Raises:
        ValueError: If the name is unknown or required inputs are missing
        DimensionMismatch: If ``dimension`` conflicts with a fixed-dimension objective
    """
    if name not in OBJECTIVE_NAMES:
        raise ValueError(
            f"unknown objective '{name}', expected one of {', '.join(OBJECTIVE_NAMES)}"
        )
    fixed = _FIXED_DIMENSION.get(name)
    if fixed is not None and dimension is not None and dimension != fixed:
        raise DimensionMismatch(f"objective '{name}' is {fixed}-dimensional, got {dimension}")
    dim = fixed or dimension or 2

    if name == "ackley":
        return Objective(name, dim, ackley_translated, np.array([2.0, 2.0]))
    if name == "rastrigin":
        return Objective(name, dim, rastrigin, np.zeros(dim))
    if name == "rosenbrock":
        return Objective(name, dim, rosenbrock2, np.array([1.0, 1.0]))
    if name == "townsend":
        return Objective(name, dim, townsend, townsend_reference_minimizer())
    if name == "quadratic":
        c = np.full(dim, 0.5) if center is None else np.asarray(center, dtype=float)
        return Objective(name, dim, partial(quadratic, center=c), c)
    if name == "constant":
        return Objective(name, dim, constant)

    if observations is None:
        raise ValueError("objective 'merton' needs an observation set")
    minimizer = None if theta_true is None else theta_true.as_array()
    return Objective(
        name,
        dim,
        partial(merton_loss_batch, obs=observations, lambda_reg=lambda_reg),
        minimizer,
    )


__all__ = [
    "Objective",
    "MertonParams",
    "ObservationSet",
    "ackley_translated",
    "rastrigin",
    "rosenbrock2",
    "townsend",
    "quadratic",
    "constant",
    "townsend_reference_minimizer",
    "clear_cache",
    "merton_series",
    "merton_price",
    "merton_monte_carlo",
    "generate_observations",
    "merton_loss",
    "merton_loss_batch",
    "get_objective",
    "OBJECTIVE_NAMES",
    "HORIZON",
    "OBSERVATION_TIMES",
    "OBSERVATION_POINTS",
    "SEARCH_LOWER",
    "SEARCH_UPPER",
    "DEFAULT_LAMBDA_REG",
    "DEFAULT_NOISE_SCALE",
]
