"""Invert command implementation."""

import click
import numpy as np

from rcbo.commands.utils import (
    RunSpec,
    build_spec,
    common_options,
    dispatch,
    echo_vector,
    merge_settings,
    register_runner,
)
from rcbo.experiment import (
    invert_merton,
    parameter_histograms,
    success_frame,
    write_report,
)
from rcbo.objective import DEFAULT_NOISE_SCALE

INVERSION_DEFAULTS = {
    "runs": 1000,
    "alpha": 1e14,
    "particles": 400,
    "steps": 100,
    "h": 0.01,
    "eps": 0.01,
}


@click.command()
@click.option("--runs", "-r", type=click.IntRange(min=1), help="Replicas [default: 1000]")
@click.option("--alpha", type=float, help="Consensus weight exponent [default: 1e14]")
@click.option("--particles", "-N", type=click.IntRange(min=1), help="Ensemble size [default: 400]")
@click.option("--steps", "-K", type=click.IntRange(min=1), help="Number of steps [default: 100]")
@click.option("--h", type=float, help="Step size [default: 0.01]")
@click.option("--eps", type=float, help="Success radius [default: 0.01]")
@click.option(
    "--noise-scale",
    type=click.FloatRange(min=0.0),
    default=DEFAULT_NOISE_SCALE,
    show_default=True,
    help="Observation noise level",
)
@common_options
@click.pass_context
def invert(ctx, noise_scale, config_path, out, workers, seed, **flags):
    """Recover Merton jump-diffusion parameters from noisy option values.

    Writes report.csv with the success rate and histogram_sigma.csv,
    histogram_m.csv and histogram_gamma.csv with the recovered values.
    """
    flags["seed"] = seed
    settings = merge_settings(ctx, config_path, flags, INVERSION_DEFAULTS)
    spec = build_spec(
        ctx, "invert", settings, out, workers, config_path, {"noise_scale": noise_scale}
    )
    dispatch(ctx, spec)


@register_runner("invert")
def run_invert(spec: RunSpec) -> None:
    settings = spec.settings
    report = invert_merton(
        int(settings["runs"]),
        float(settings["alpha"]),
        particles=int(settings["particles"]),
        steps=int(settings["steps"]),
        h=float(settings["h"]),
        eps=float(settings["eps"]),
        seed=int(settings["seed"]),
        noise_scale=spec.options["noise_scale"],
        workers=spec.workers,
    )
    header = report.success.config
    write_report(success_frame(report.success), spec.out / "report.csv", header)
    for name, frame in parameter_histograms(report).items():
        write_report(frame, spec.out / f"histogram_{name}.csv", header)

    success = report.success
    click.echo(
        f"success rate: {success.rate:.4f} "
        f"({success.successes}/{success.runs}, 95% CI [{success.ci_lo:.4f}, {success.ci_hi:.4f}])"
    )
    if report.failed_replicates:
        click.echo(f"{len(report.failed_replicates)} replica(s) failed numerically")
    finished = report.estimates[~np.isnan(report.estimates).any(axis=1)]
    if len(finished):
        echo_vector("mean estimate (sigma, m, gamma)", finished.mean(axis=0))
