"""Parameter recovery for the Merton jump-diffusion from noisy option values."""

import logging
import time
from functools import partial

import numpy as np
import pandas as pd

from ..domain import Box
from ..dynamics import NoiseStream, Scheme, SolverConfig, run_cbo
from ..errors import NumericalError
from ..objective import (
    DEFAULT_LAMBDA_REG,
    DEFAULT_NOISE_SCALE,
    SEARCH_LOWER,
    SEARCH_UPPER,
    MertonParams,
    generate_observations,
    get_objective,
)
from .execution import run_replicas
from .models import InversionReport, ReplicaOutcome
from .success import summarize

_logging = logging.getLogger(__name__)

THETA_TRUE = MertonParams(sigma=0.1, m=-0.2, gamma=0.3)
PARAMETER_NAMES = ("sigma", "m", "gamma")
INVERSION_BETA = "linear:0:10"
INVERSION_SIGMA = "expdecay:10:2.302585092994046"
HISTOGRAM_BINS = 30


def search_box() -> Box:
    return Box(SEARCH_LOWER, SEARCH_UPPER)


def _invert_replica(
    replicate: int,
    cfg: SolverConfig,
    theta_true: MertonParams,
    noise_scale: float,
    lambda_reg: float,
    eps: float,
) -> ReplicaOutcome:
    # fresh observation noise per replicate
    obs_seed = NoiseStream(cfg.seed, replicate).child_seed()
    obs = generate_observations(theta_true, obs_seed, noise_scale)
    obj = get_objective(
        "merton", observations=obs, theta_true=theta_true, lambda_reg=lambda_reg
    )
    reference = theta_true.as_array()
    try:
        result = run_cbo(cfg, obj, search_box(), replicate=replicate)
    except NumericalError as e:
        _logging.warning(f"replicate {replicate} failed: {e}")
        return ReplicaOutcome(replicate, None, np.inf, False, str(e))
    distance = float(np.linalg.norm(result.consensus - reference))
    return ReplicaOutcome(replicate, result.consensus, distance, distance <= eps)


def invert_merton(
    runs: int,
    alpha: float,
    particles: int = 400,
    steps: int = 100,
    h: float = 0.01,
    eps: float = 0.01,
    seed: int = 0,
    theta_true: MertonParams = THETA_TRUE,
    noise_scale: float = DEFAULT_NOISE_SCALE,
    lambda_reg: float = DEFAULT_LAMBDA_REG,
    workers: int = 1,
) -> InversionReport:
    """Recover (σ, m, γ) with projected CBO on fresh noisy data in every replica.

    A replica succeeds when |θ̂ − θ*|₂ ≤ ``eps``.

    Raises:
        ValueError: If runs < 1 or the solver settings are invalid
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    cfg = SolverConfig(
        scheme=Scheme.PROJECTION,
        alpha=alpha,
        beta=INVERSION_BETA,
        sigma=INVERSION_SIGMA,
        h=h,
        steps=steps,
        particles=particles,
        seed=seed,
    )
    started = time.perf_counter()
    outcomes = run_replicas(
        partial(
            _invert_replica,
            cfg=cfg,
            theta_true=theta_true,
            noise_scale=noise_scale,
            lambda_reg=lambda_reg,
            eps=eps,
        ),
        runs,
        workers,
    )
    snapshot = {
        **cfg.snapshot(),
        "objective": "merton",
        "eps": eps,
        "noise_scale": noise_scale,
        "lambda_reg": lambda_reg,
        "theta_true": ",".join(repr(float(v)) for v in theta_true.as_array()),
    }
    report = summarize(outcomes, snapshot, time.perf_counter() - started)
    estimates = np.array(
        [o.consensus if o.consensus is not None else np.full(3, np.nan) for o in outcomes]
    )
    _logging.info(
        f"merton inversion: {report.successes}/{report.runs} within {eps:g} "
        f"(rate {report.rate:.3f})"
    )
    return InversionReport(
        success=report,
        estimates=estimates,
        theta_true=theta_true.as_array(),
        failed_replicates=[o.replicate for o in outcomes if o.failed],
    )


def parameter_histograms(
    report: InversionReport, bins: int = HISTOGRAM_BINS
) -> dict[str, pd.DataFrame]:
    """Histogram of each recovered parameter over every replica that finished."""
    frames = {}
    finished = report.estimates[~np.isnan(report.estimates).any(axis=1)]
    for k, name in enumerate(PARAMETER_NAMES):
        if len(finished):
            counts, edges = np.histogram(finished[:, k], bins=bins)
        else:
            counts, edges = np.zeros(bins, dtype=int), np.linspace(0.0, 1.0, bins + 1)
        frames[name] = pd.DataFrame(
            {
                "bin_lo": edges[:-1],
                "bin_hi": edges[1:],
                "count": counts,
                "true_value": report.theta_true[k],
            }
        )
    return frames
