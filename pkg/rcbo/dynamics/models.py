"""Data models for the particle-system engine."""

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

MAX_SEED = 2**64 - 1


@dataclass
class Ensemble:
    positions: np.ndarray
    time: float = 0.0
    step: int = 0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.ndim != 2 or self.positions.shape[0] < 1:
            raise ValueError("positions must be an (N, d) array with N >= 1")
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("positions must be finite")
        if self.time < 0:
            raise ValueError("time must be nonnegative")
        if self.step < 0:
            raise ValueError("step must be nonnegative")

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    def variance(self) -> float:
        """Mean squared distance of the particles from their arithmetic mean."""
        centred = self.positions - self.positions.mean(axis=0)
        return float(np.mean(np.sum(centred**2, axis=1)))


class ScheduleKind(Enum):
    CONSTANT = "const"
    LINEAR = "linear"
    EXPDECAY = "expdecay"
    INVSQ = "invsq"


_PARAM_COUNT = {
    ScheduleKind.CONSTANT: 1,
    ScheduleKind.LINEAR: 2,
    ScheduleKind.EXPDECAY: 2,
    ScheduleKind.INVSQ: 1,
}


@dataclass(frozen=True)
class Schedule:
    """Time-dependent coefficient such as β(t), σ(t) or λ(t).

    Text form is ``kind:p1[:p2]``; a bare number is a constant schedule.

    Example:
        >>> Schedule.parse("linear:0:10")(0.5)
        5.0
    """

    kind: ScheduleKind
    params: tuple[float, ...]

    def __post_init__(self):
        expected = _PARAM_COUNT[self.kind]
        if len(self.params) != expected:
            raise ValueError(
                f"schedule '{self.kind.value}' takes {expected} parameter(s), "
                f"got {len(self.params)}"
            )
        if not all(math.isfinite(p) for p in self.params):
            raise ValueError("schedule parameters must be finite")

    @classmethod
    def constant(cls, value: float) -> "Schedule":
        return cls(ScheduleKind.CONSTANT, (float(value),))

    @classmethod
    def parse(cls, text: "str | float | int | Schedule") -> "Schedule":
        if isinstance(text, Schedule):
            return text
        if isinstance(text, (int, float)):
            return cls.constant(text)

        head, *rest = text.strip().split(":")
        if not rest:
            try:
                return cls.constant(float(head))
            except ValueError:
                raise ValueError(f"invalid schedule '{text}'") from None
        try:
            kind = ScheduleKind(head.lower())
        except ValueError:
            kinds = ", ".join(k.value for k in ScheduleKind)
            raise ValueError(
                f"unknown schedule kind '{head}', expected one of {kinds}"
            ) from None
        try:
            params = tuple(float(p) for p in rest)
        except ValueError:
            raise ValueError(f"invalid schedule parameters in '{text}'") from None
        return cls(kind, params)

    def __call__(self, t: float) -> float:
        p = self.params
        if self.kind is ScheduleKind.CONSTANT:
            return p[0]
        if self.kind is ScheduleKind.LINEAR:
            return p[0] + p[1] * t
        if self.kind is ScheduleKind.EXPDECAY:
            return p[0] * math.exp(-p[1] * t)
        return p[0] / (1.0 + t * t)

    def __str__(self) -> str:
        return ":".join([self.kind.value, *(repr(p) for p in self.params)])

    def is_nonnegative_on(self, horizon: float) -> bool:
        # linear is the only kind that can change sign; check both ends
        if self.kind is ScheduleKind.LINEAR:
            return self(0.0) >= 0 and self(horizon) >= 0
        return self.params[0] >= 0


class Scheme(Enum):
    PENALTY = "penalty"
    PROJECTION = "projection"


@dataclass
class SolverConfig:
    """Everything a CBO run needs besides the objective and the domain."""

    scheme: Scheme
    alpha: float
    beta: Schedule
    sigma: Schedule
    h: float
    steps: int
    particles: int
    seed: int
    repelling: Schedule | None = None
    penalty_epsilon: float | None = None

    def __post_init__(self):
        if isinstance(self.scheme, str):
            self.scheme = Scheme(self.scheme)
        self.beta = Schedule.parse(self.beta)
        self.sigma = Schedule.parse(self.sigma)
        if self.repelling is not None:
            self.repelling = Schedule.parse(self.repelling)

        if not self.alpha >= 0 or not math.isfinite(self.alpha):
            raise ValueError("alpha must be a finite nonnegative number")
        if not self.h > 0 or not math.isfinite(self.h):
            raise ValueError("h must be positive")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.particles < 1:
            raise ValueError("particles must be at least 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")

        if self.penalty_epsilon is None:
            self.penalty_epsilon = self.h
        elif not self.penalty_epsilon > 0:
            raise ValueError("penalty_epsilon must be positive")

        horizon = self.horizon
        for name in ("beta", "sigma", "repelling"):
            schedule = getattr(self, name)
            if schedule is not None and not schedule.is_nonnegative_on(horizon):
                raise ValueError(f"{name} must be nonnegative on [0, {horizon:g}]")

    @property
    def horizon(self) -> float:
        return self.steps * self.h

    def snapshot(self) -> dict[str, str | int | float]:
        """Flat view of the configuration for logs and report headers."""
        return {
            "scheme": self.scheme.value,
            "alpha": self.alpha,
            "beta": str(self.beta),
            "sigma": str(self.sigma),
            "repelling": "off" if self.repelling is None else str(self.repelling),
            "h": self.h,
            "steps": self.steps,
            "particles": self.particles,
            "seed": self.seed,
            "penalty_epsilon": float(self.penalty_epsilon or self.h),
        }


def _zero_gradient(points: np.ndarray) -> np.ndarray:
    return np.zeros_like(points)


@dataclass
class LangevinConfig:
    """Reflected mean-field Langevin run.

    ``grad_U`` maps an (N, d) array of positions to (N, d) gradients and
    ``grad_V`` maps an (..., d) array of pairwise differences to gradients of
    the same shape; ``None`` switches the interaction off. ``U`` and ``V``
    are the potentials themselves, needed only by the invariant-density oracle.
    """

    sigma_noise: float
    h: float
    steps: int
    particles: int
    seed: int
    grad_U: Callable[[np.ndarray], np.ndarray] = field(default=_zero_gradient)
    grad_V: Callable[[np.ndarray], np.ndarray] | None = None
    U: Callable[[np.ndarray], np.ndarray] | None = None
    V: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not self.sigma_noise >= 0:
            raise ValueError("sigma_noise must be nonnegative")
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.particles < 1:
            raise ValueError("particles must be at least 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
