"""Feasible-region geometry for the reflected particle integrators.

Every domain answers the same questions: is a point inside the closed set,
where does it project to, which way is inward on the boundary, and how to draw
uniform initial particles. All operations accept a single point of shape
``(d,)`` or a batch of shape ``(n, d)`` and return the matching shape.

Domains are immutable after construction; randomness always comes from a
caller-owned ``numpy.random.Generator``.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy.optimize import bisect

from .errors import (
    DegenerateGradientError,
    DimensionMismatch,
    DomainError,
    NonConvergenceError,
    RejectionBudgetExceeded,
)

_logging = logging.getLogger(__name__)

LevelFunction = Callable[[np.ndarray], np.ndarray]
GradientFunction = Callable[[np.ndarray], np.ndarray]

GRADIENT_FLOOR = 1e-12
MIN_ACCEPTANCE = 1e-4
REJECTION_WINDOW = 1024


@dataclass(frozen=True)
class ProjectionSettings:
    """Tolerances for boundary membership and level-set projection."""

    tol_proj: float = 1e-10
    max_newton_iters: int = 50
    bisection_fallback: bool = True

    def __post_init__(self):
        if not self.tol_proj > 0:
            raise ValueError("tol_proj must be positive")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be at least 1")


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D point")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FeasibleDomain(ABC):
    """Closed feasible set with projection, penalty and sampling support."""

    kind: ClassVar[str] = "abstract"

    settings: ProjectionSettings = field(
        default_factory=ProjectionSettings, kw_only=True
    )

    @property
    @abstractmethod
    def dimension(self) -> int: ...

    @abstractmethod
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]: ...

    @abstractmethod
    def _contains_rows(self, points: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _project_rows(self, points: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _normal_rows(self, points: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _sample_rows(self, rng: np.random.Generator, n: int) -> np.ndarray: ...

    def _as_batch(self, x) -> tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        batch = arr[None, :] if single else arr
        if batch.ndim != 2 or batch.shape[1] != self.dimension:
            got = arr.shape[-1] if arr.ndim else 0
            raise DimensionMismatch(
                f"point dimension {got} does not match {self.kind} "
                f"dimension {self.dimension}"
            )
        return batch, single

    def diameter(self) -> float:
        lower, upper = self.bounding_box()
        return float(np.linalg.norm(upper - lower))

    def contains(self, x) -> bool | np.ndarray:
        """Membership in the closed set, boundary included (within tol_proj)."""
        batch, single = self._as_batch(x)
        inside = self._contains_rows(batch)
        return bool(inside[0]) if single else inside

    def project(self, x) -> np.ndarray:
        """Return Π(x): x itself when feasible, else a boundary point."""
        batch, single = self._as_batch(x)
        result = batch.copy()
        outside = ~self._contains_rows(batch)
        if np.any(outside):
            result[outside] = self._project_rows(batch[outside])
        return result[0] if single else result

    def penalty_vector(self, x) -> np.ndarray:
        """Return π(x) = x − Π(x); exactly zero for feasible points."""
        batch, single = self._as_batch(x)
        penalty = batch - self.project(batch)
        return penalty[0] if single else penalty

    def inward_normal(self, x_boundary) -> np.ndarray:
        """Unit inward normal ν at boundary points."""
        batch, single = self._as_batch(x_boundary)
        normals = self._normal_rows(batch)
        return normals[0] if single else normals

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n i.i.d. points uniformly from the closed set, shape (n, d)."""
        if n < 1:
            raise ValueError("n must be at least 1")
        return self._sample_rows(rng, n)


@dataclass(frozen=True, eq=False)
class Ball(FeasibleDomain):
    """Closed Euclidean ball."""

    kind: ClassVar[str] = "ball"

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen_array(self.center, "center"))
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dimension(self) -> int:
        return self.center.size

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.radius, self.center + self.radius

    def _contains_rows(self, points: np.ndarray) -> np.ndarray:
        dist = np.linalg.norm(points - self.center, axis=1)
        return dist <= self.radius + self.settings.tol_proj

    def _project_rows(self, points: np.ndarray) -> np.ndarray:
        offset = points - self.center
        dist = np.linalg.norm(offset, axis=1, keepdims=True)
        return self.center + offset * (self.radius / dist)

    def _normal_rows(self, points: np.ndarray) -> np.ndarray:
        toward = self.center - points
        norms = np.linalg.norm(toward, axis=1, keepdims=True)
        if np.any(norms < GRADIENT_FLOOR):
            raise DegenerateGradientError("inward normal undefined at the ball center")
        return toward / norms

    def _sample_rows(self, rng: np.random.Generator, n: int) -> np.ndarray:
        direction = rng.standard_normal((n, self.dimension))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = self.radius * rng.random(n) ** (1.0 / self.dimension)
        return self.center + direction * radius[:, None]


@dataclass(frozen=True, eq=False)
class Box(FeasibleDomain):
    """Axis-aligned box [lower, upper]."""

    kind: ClassVar[str] = "box"

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen_array(self.lower, "lower")
        upper = _frozen_array(self.upper, "upper")
        if lower.shape != upper.shape:
            raise ValueError("lower and upper must have the same dimension")
        if not np.all(lower < upper):
            raise ValueError("lower must be strictly less than upper componentwise")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dimension(self) -> int:
        return self.lower.size

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lower.copy(), self.upper.copy()

    def _contains_rows(self, points: np.ndarray) -> np.ndarray:
        tol = self.settings.tol_proj
        return np.all(
            (points >= self.lower - tol) & (points <= self.upper + tol), axis=1
        )

    def _project_rows(self, points: np.ndarray) -> np.ndarray:
        return np.clip(points, self.lower, self.upper)

    def _normal_rows(self, points: np.ndarray) -> np.ndarray:
        tol = self.settings.tol_proj
        normal = (np.abs(points - self.lower) <= tol).astype(float)
        normal -= (np.abs(points - self.upper) <= tol).astype(float)
        norms = np.linalg.norm(normal, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise DomainError("inward normal requested for a point off the box boundary")
        return normal / norms

    def _sample_rows(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.lower + (self.upper - self.lower) * rng.random((n, self.dimension))


@dataclass(frozen=True, eq=False)
class LevelSet(FeasibleDomain):
    """Sublevel set {g ≤ 0} of a smooth scalar field.

    ``level`` maps an ``(n, d)`` batch to ``(n,)`` values and ``gradient`` to
    ``(n, d)``. ``lower``/``upper`` bound the set for rejection sampling.
    ``anchor`` is an optional interior point used as the last projection
    fallback.
    """

    kind: ClassVar[str] = "levelset"

    level: LevelFunction
    gradient: GradientFunction
    lower: np.ndarray
    upper: np.ndarray
    anchor: np.ndarray | None = None

    def __post_init__(self):
        lower = _frozen_array(self.lower, "lower")
        upper = _frozen_array(self.upper, "upper")
        if lower.shape != upper.shape or not np.all(lower < upper):
            raise ValueError("bounding box must satisfy lower < upper componentwise")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.anchor is not None:
            anchor = _frozen_array(self.anchor, "anchor")
            if anchor.shape != lower.shape:
                raise ValueError("anchor must match the domain dimension")
            if self.level(anchor[None, :])[0] >= 0:
                raise ValueError("anchor must lie strictly inside the level set")
            object.__setattr__(self, "anchor", anchor)

    @property
    def dimension(self) -> int:
        return self.lower.size

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lower.copy(), self.upper.copy()

    def _contains_rows(self, points: np.ndarray) -> np.ndarray:
        return self.level(points) <= self.settings.tol_proj

    def _project_rows(self, points: np.ndarray) -> np.ndarray:
        grad = self.gradient(points)
        norms = np.linalg.norm(grad, axis=1)
        usable = norms >= GRADIENT_FLOOR
        direction = np.zeros_like(points)
        direction[usable] = -grad[usable] / norms[usable, None]

        steps, converged = self._newton_along(points, direction, usable)
        result = points + steps[:, None] * direction

        for row in np.flatnonzero(~converged):
            result[row] = self._fallback(points[row], direction[row], usable[row])
        return result

    def _newton_along(
        self, points: np.ndarray, direction: np.ndarray, usable: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        tol = self.settings.tol_proj
        steps = np.zeros(len(points))
        converged = np.zeros(len(points), dtype=bool)
        active = usable.copy()

        for _ in range(self.settings.max_newton_iters):
            if not np.any(active):
                break
            idx = np.flatnonzero(active)
            trial = points[idx] + steps[idx, None] * direction[idx]
            phi = self.level(trial)
            hit = np.abs(phi) <= tol
            converged[idx[hit]] = True
            active[idx[hit]] = False

            idx, phi, trial = idx[~hit], phi[~hit], trial[~hit]
            slope = np.sum(self.gradient(trial) * direction[idx], axis=1)
            stalled = ~(slope < 0) | ~np.isfinite(phi)
            active[idx[stalled]] = False
            move = ~stalled
            steps[idx[move]] -= phi[move] / slope[move]

        return steps, converged

    def _fallback(self, point: np.ndarray, direction: np.ndarray, usable: bool) -> np.ndarray:
        if self.settings.bisection_fallback:
            if usable:
                found = self._bisect_ray(point, direction)
                if found is not None:
                    return found
            if self.anchor is not None:
                found = self._bisect_ray(point, self.anchor - point, upper=1.0)
                if found is not None:
                    return found
        raise NonConvergenceError(
            f"projection onto the level set failed for point {point.tolist()}"
        )

    def _bisect_ray(
        self, point: np.ndarray, direction: np.ndarray, upper: float | None = None
    ) -> np.ndarray | None:
        tol = self.settings.tol_proj

        def phi(s: float) -> float:
            return float(self.level((point + s * direction)[None, :])[0])

        if upper is None:
            upper = self.diameter() * 1e-3
            reach = 4.0 * (self.diameter() + float(np.linalg.norm(point - self.lower)))
            while phi(upper) > 0:
                upper *= 2.0
                if upper > reach:
                    return None
        elif phi(upper) > 0:
            return None

        s = bisect(phi, 0.0, upper, xtol=1e-15, maxiter=400)
        if phi(s) > tol:
            return None
        _logging.debug(f"bisection fallback used at {point.tolist()}")
        return point + s * direction

    def _normal_rows(self, points: np.ndarray) -> np.ndarray:
        grad = self.gradient(points)
        norms = np.linalg.norm(grad, axis=1, keepdims=True)
        if np.any(norms < GRADIENT_FLOOR):
            raise DegenerateGradientError(
                "level-set gradient vanishes at the requested boundary point"
            )
        return -grad / norms

    def _sample_rows(self, rng: np.random.Generator, n: int) -> np.ndarray:
        width = self.upper - self.lower
        window = max(REJECTION_WINDOW, 4 * n)
        accepted: list[np.ndarray] = []
        count = 0
        while count < n:
            proposals = self.lower + width * rng.random((window, self.dimension))
            keep = proposals[self._contains_rows(proposals)]
            if len(keep) / window < MIN_ACCEPTANCE:
                raise RejectionBudgetExceeded(
                    f"{self.kind} accepted {len(keep)} of {window} proposals"
                )
            accepted.append(keep)
            count += len(keep)
        return np.concatenate(accepted)[:n]


def _heart_profile(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = 2 * np.cos(t) - 0.5 * np.cos(2 * t) - 0.25 * np.cos(3 * t) - 0.125 * np.cos(4 * t)
    da = -2 * np.sin(t) + np.sin(2 * t) + 0.75 * np.sin(3 * t) + 0.5 * np.sin(4 * t)
    return a, da


def heart_level(points: np.ndarray) -> np.ndarray:
    """x² + y² − R(t)², t = atan2(x, y); nonpositive inside the heart."""
    x, y = points[:, 0], points[:, 1]
    t = np.arctan2(x, y)
    a, _ = _heart_profile(t)
    return x**2 + y**2 - (a**2 + 4 * np.sin(t) ** 2)


def heart_gradient(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    t = np.arctan2(x, y)
    a, da = _heart_profile(t)
    d_radius_sq = 2 * a * da + 8 * np.sin(t) * np.cos(t)
    r2 = x**2 + y**2
    inv_r2 = np.divide(1.0, r2, out=np.zeros_like(r2), where=r2 > 0)
    return np.column_stack(
        (2 * x - d_radius_sq * y * inv_r2, 2 * y + d_radius_sq * x * inv_r2)
    )


@dataclass(frozen=True, eq=False)
class HeartRegion(LevelSet):
    """Non-convex heart-shaped region in the plane, star-shaped about the origin."""

    kind: ClassVar[str] = "levelset-heart"

    level: LevelFunction = heart_level
    gradient: GradientFunction = heart_gradient
    lower: np.ndarray = field(default_factory=lambda: np.full(2, -3.0))
    upper: np.ndarray = field(default_factory=lambda: np.full(2, 3.0))
    anchor: np.ndarray | None = field(default_factory=lambda: np.zeros(2))


DOMAIN_KINDS = ("ball", "box", "levelset-heart")


__all__ = [
    "ProjectionSettings",
    "FeasibleDomain",
    "Ball",
    "Box",
    "LevelSet",
    "HeartRegion",
    "heart_level",
    "heart_gradient",
    "DOMAIN_KINDS",
]
