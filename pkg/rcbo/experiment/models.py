"""Report models for the replicated experiments."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ReplicaOutcome:
    replicate: int
    consensus: np.ndarray | None
    distance: float
    success: bool
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class SuccessReport:
    runs: int
    successes: int
    rate: float
    ci_lo: float
    ci_hi: float
    failures: int = 0
    config: dict[str, str | int | float] = field(default_factory=dict)
    wall_time: float = 0.0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if not 0 <= self.successes <= self.runs:
            raise ValueError("successes must lie between 0 and runs")
        if not self.ci_lo <= self.rate <= self.ci_hi:
            raise ValueError("confidence interval must contain the rate")

    @property
    def wilson_ci_95(self) -> tuple[float, float]:
        return self.ci_lo, self.ci_hi


@dataclass
class RateStudyReport:
    n_values: list[int]
    errors: list[float]
    error_std: list[float]
    slope: float
    slope_stderr: float
    intercept: float
    n_ref: int
    replicas: int

    def __post_init__(self):
        if len(self.n_values) < 2:
            raise ValueError("n_values must have at least 2 entries")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("n_values must be strictly increasing")
        if not len(self.errors) == len(self.error_std) == len(self.n_values):
            raise ValueError("errors must have one entry per N")


@dataclass
class DecayReport:
    """Replica-averaged variance curve against the bound Var(0)·e^{−η₀t}·factor."""

    eta0: float
    bound_factor: float
    times: np.ndarray
    variance: np.ndarray
    checkpoints: list[float]
    replicas: int

    @property
    def bound(self) -> np.ndarray:
        return self.variance[0] * np.exp(-self.eta0 * self.times) * self.bound_factor

    def violations(self) -> list[float]:
        """Checkpoint times where the averaged variance exceeds the bound."""
        bound = self.bound
        bad = []
        for t in self.checkpoints:
            k = int(np.argmin(np.abs(self.times - t)))
            if self.variance[k] > bound[k]:
                bad.append(float(self.times[k]))
        return bad

    @property
    def passed(self) -> bool:
        return not self.violations()


@dataclass
class InvariantReport:
    preset: str
    l1_distance: float
    tolerance: float
    bin_edges: np.ndarray
    empirical_mass: np.ndarray
    oracle_mass: np.ndarray
    w1_times: np.ndarray
    w1_values: np.ndarray
    oracle_iterations: int
    samples: int

    @property
    def passed(self) -> bool:
        return self.l1_distance <= self.tolerance


@dataclass
class InversionReport:
    success: SuccessReport
    estimates: np.ndarray
    theta_true: np.ndarray
    failed_replicates: list[int] = field(default_factory=list)


@dataclass
class TablePanel:
    label: str
    scheme: str
    rates: list[list[float]]
    steps: int | None = None
    repelling: str | None = None


@dataclass
class BenchmarkTable:
    """A bundled success-rate table: solver settings plus the published grid."""

    name: str
    description: str
    objective: str
    domain: dict
    alpha: float
    beta: str
    sigma: str
    eps: float
    row_key: str
    rows: list[int]
    particles: list[int]
    panels: list[TablePanel]
    dimension: int | None = None
    h: float | None = None
    horizon: float | None = None
    long_rows: list[int] = field(default_factory=list)
    tolerance: float = 0.05
    saturated_floor: float = 0.97

    def __post_init__(self):
        if self.row_key not in ("inv_h", "steps", "dimension"):
            raise ValueError("row_key must be one of inv_h, steps, dimension")
        if self.row_key == "inv_h" and self.horizon is None:
            raise ValueError("horizon is required when rows are 1/h")
        if self.row_key != "inv_h" and self.h is None:
            raise ValueError("h is required unless rows are 1/h")
        for panel in self.panels:
            if len(panel.rates) != len(self.rows) or any(
                len(r) != len(self.particles) for r in panel.rates
            ):
                raise ValueError(
                    f"panel '{panel.label}' rates must be a "
                    f"{len(self.rows)}x{len(self.particles)} grid"
                )

    def reference_rate(self, panel: TablePanel, row: int, particles: int) -> float:
        return panel.rates[self.rows.index(row)][self.particles.index(particles)]
