"""Empirical N^{-1/2} scaling of the finite-ensemble consensus.

The mean-field limit is not available in closed form, so a large-N run
averaged over replicas stands in for it.
"""

import logging
from dataclasses import replace
from functools import partial

import numpy as np
from scipy.stats import linregress

from ..domain import FeasibleDomain
from ..dynamics import SolverConfig, run_cbo
from ..errors import InsufficientReplicas
from ..objective import Objective
from .execution import run_replicas
from .models import RateStudyReport

_logging = logging.getLogger(__name__)

MIN_REPLICAS = 20
MAX_SLOPE_STDERR = 0.1


def _consensus_block(
    cfg: SolverConfig,
    obj: Objective,
    dom: FeasibleDomain,
    particles: int,
    replicas: int,
    block: int,
    workers: int,
) -> np.ndarray:
    """Final consensus of ``replicas`` runs at size ``particles``, stacked (R, d).

    Each block reads its own replicate indices so no two sizes share noise.
    """
    sized = replace(cfg, particles=particles)
    offset = block * replicas
    fn = partial(_offset_consensus, offset=offset, cfg=sized, obj=obj, dom=dom)
    return np.vstack(run_replicas(fn, replicas, workers))


def _offset_consensus(
    replicate: int, offset: int, cfg: SolverConfig, obj: Objective, dom: FeasibleDomain
) -> np.ndarray:
    return run_cbo(cfg, obj, dom, replicate=replicate + offset).consensus


def chaos_rate_study(
    cfg: SolverConfig,
    obj: Objective,
    dom: FeasibleDomain,
    n_list: list[int],
    n_ref: int,
    replicas: int,
    workers: int = 1,
) -> RateStudyReport:
    """Fit the log-log slope of the consensus discrepancy against N.

    For each N the discrepancy is the replica mean of |X̄_N − X̄_ref|, where
    X̄_ref is the replica-averaged final consensus at ``n_ref`` particles.

    Raises:
        ValueError: If fewer than two sizes are given, sizes are not
            increasing, max(n_list) > n_ref / 4 or replicas < 20
        InsufficientReplicas: If the slope's standard error exceeds 0.1
    """
    n_values = [int(n) for n in n_list]
    if len(n_values) < 2:
        raise ValueError("n_list must contain at least 2 sizes to fit a slope")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n_list must be strictly increasing")
    if n_values[0] < 1:
        raise ValueError("n_list sizes must be positive")
    if 4 * n_values[-1] > n_ref:
        raise ValueError(f"max(n_list) must be at most n_ref / 4 = {n_ref / 4:g}")
    if replicas < MIN_REPLICAS:
        raise ValueError(f"replicas must be at least {MIN_REPLICAS}")

    _logging.info(f"reference ensemble: N={n_ref}, {replicas} replicas")
    reference = _consensus_block(cfg, obj, dom, n_ref, replicas, 0, workers).mean(axis=0)

    errors, error_std = [], []
    for block, n in enumerate(n_values, start=1):
        finals = _consensus_block(cfg, obj, dom, n, replicas, block, workers)
        dist = np.linalg.norm(finals - reference, axis=1)
        errors.append(float(dist.mean()))
        error_std.append(float(dist.std(ddof=1)))
        _logging.info(f"N={n}: mean discrepancy {errors[-1]:.4g}")

    fit = linregress(np.log(n_values), np.log(errors))
    report = RateStudyReport(
        n_values=n_values,
        errors=errors,
        error_std=error_std,
        slope=float(fit.slope),
        slope_stderr=float(fit.stderr),
        intercept=float(fit.intercept),
        n_ref=n_ref,
        replicas=replicas,
    )
    _logging.info(f"fitted slope {report.slope:.3f} ± {report.slope_stderr:.3f}")
    if report.slope_stderr > MAX_SLOPE_STDERR:
        raise InsufficientReplicas(
            f"slope standard error {report.slope_stderr:.3f} exceeds "
            f"{MAX_SLOPE_STDERR}; increase replicas"
        )
    return report
