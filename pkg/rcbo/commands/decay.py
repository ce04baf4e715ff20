"""Decay command implementation."""

import click

from rcbo.commands.utils import (
    RunSpec,
    build_spec,
    common_options,
    dispatch,
    merge_settings,
    register_runner,
)
from rcbo.config import ConfigError, domain_from_settings
from rcbo.domain import Ball
from rcbo.errors import DecayBoundViolation
from rcbo.experiment import decay_frame, variance_decay_check, write_report
from rcbo.experiment.models import DecayReport

DECAY_DEFAULTS = {
    "beta": 2.0,
    "sigma": 1.0,
    "alpha": 1.0,
    "particles": 100,
    "h": 0.01,
    "runs": 200,
    "dimension": 2,
    "domain.kind": "ball",
    "domain.radius": 1.0,
}


@click.command()
@click.option("--beta", type=float, help="Constant drift strength [default: 2]")
@click.option("--sigma", type=float, help="Constant noise strength [default: 1]")
@click.option("--alpha", type=float, help="Consensus weight exponent [default: 1]")
@click.option(
    "--particles", "-N", type=click.IntRange(min=1), help="Ensemble size [default: 100]"
)
@click.option("--h", type=float, help="Step size [default: 0.01]")
@click.option("--replicas", "runs", type=click.IntRange(min=1), help="Replicas [default: 200]")
@click.option("--radius", type=float, help="Ball radius [default: 1]")
@click.option("--dimension", "-d", type=click.IntRange(min=1), help="Dimension [default: 2]")
@click.option("--horizon", type=float, default=1.0, show_default=True, help="Final time")
@common_options
@click.pass_context
def decay(ctx, radius, horizon, config_path, out, workers, seed, **flags):
    """Check the exponential variance decay of constant-objective CBO.

    Writes decay_curve.csv and exits with status 2 if the variance leaves its
    bound at any checkpoint.
    """
    flags["domain.radius"] = radius
    flags["seed"] = seed
    settings = merge_settings(ctx, config_path, flags, DECAY_DEFAULTS)
    spec = build_spec(ctx, "decay", settings, out, workers, config_path, {"horizon": horizon})
    dispatch(ctx, spec)


def _write_curve(report: DecayReport, spec: RunSpec, header: dict) -> None:
    header = {**header, "eta0": report.eta0, "bound_factor": report.bound_factor}
    write_report(decay_frame(report), spec.out / "decay_curve.csv", header)


@register_runner("decay")
def run_decay(spec: RunSpec) -> None:
    settings = spec.settings
    dom = domain_from_settings(settings, int(settings["dimension"]))
    if not isinstance(dom, Ball):
        raise ConfigError("the variance decay check runs on a ball domain")
    try:
        beta, sigma, alpha, h = (float(settings[k]) for k in ("beta", "sigma", "alpha", "h"))
    except ValueError:
        raise ConfigError("beta, sigma, alpha and h must be plain numbers for the decay check")
    header = {
        "beta": beta,
        "sigma": sigma,
        "alpha": alpha,
        "h": h,
        "particles": int(settings["particles"]),
        "replicas": int(settings["runs"]),
        "radius": dom.radius,
        "dimension": dom.dimension,
        "horizon": spec.options["horizon"],
        "seed": int(settings["seed"]),
    }
    try:
        report = variance_decay_check(
            beta,
            sigma,
            alpha,
            dom,
            int(settings["runs"]),
            particles=int(settings["particles"]),
            h=h,
            horizon=spec.options["horizon"],
            seed=int(settings["seed"]),
            workers=spec.workers,
        )
    except DecayBoundViolation as e:
        if isinstance(e.report, DecayReport):
            _write_curve(e.report, spec, header)
        raise
    _write_curve(report, spec, header)
    times = ", ".join(f"{t:g}" for t in report.checkpoints)
    click.echo(f"variance decay bound holds at t = {times}")
