"""Chaos command implementation."""

import click

from rcbo.commands.utils import (
    RunSpec,
    build_spec,
    common_options,
    dispatch,
    merge_settings,
    register_runner,
)
from rcbo.config import (
    ConfigError,
    domain_from_settings,
    objective_from_settings,
    parse_vector,
    solver_from_settings,
)
from rcbo.experiment import chaos_rate_study, rate_study_frame, write_report

DEFAULT_N_LIST = "32,64,128,256,512"
DEFAULT_N_REF = 4096

# Smooth strongly convex study problem; any of these may come from --config.
STUDY_DEFAULTS = {
    "objective": "quadratic",
    "dimension": 2,
    "domain.kind": "ball",
    "domain.radius": 2.0,
    "scheme": "projection",
    "alpha": 1.0,
    "beta": "1",
    "sigma": "0.5",
    "h": 0.01,
    "steps": 50,
    "particles": DEFAULT_N_REF,
    "runs": 40,
}


@click.command()
@click.option("--n-list", help=f"Ensemble sizes to compare [default: {DEFAULT_N_LIST}]")
@click.option(
    "--n-ref",
    type=click.IntRange(min=1),
    default=DEFAULT_N_REF,
    show_default=True,
    help="Reference ensemble size",
)
@click.option(
    "--replicas", "runs", type=click.IntRange(min=1), help="Replicas per size [default: 40]"
)
@common_options
@click.pass_context
def chaos(ctx, n_list, n_ref, runs, config_path, out, workers, seed):
    """Measure how the consensus discrepancy shrinks with the ensemble size.

    Fits the slope of log(error) against log(N); values near -0.5 match the
    expected N^(-1/2) rate.
    """
    settings = merge_settings(
        ctx, config_path, {"runs": runs, "seed": seed}, STUDY_DEFAULTS
    )
    try:
        sizes = [int(n) for n in parse_vector(n_list or DEFAULT_N_LIST, "--n-list")]
    except ConfigError as e:
        raise click.BadParameter(str(e), ctx, param_hint="--n-list") from e
    spec = build_spec(
        ctx, "chaos", settings, out, workers, config_path, {"n_list": sizes, "n_ref": n_ref}
    )
    dispatch(ctx, spec)


@register_runner("chaos")
def run_chaos(spec: RunSpec) -> None:
    settings = spec.settings
    cfg = solver_from_settings(settings)
    obj = objective_from_settings(settings)
    dom = domain_from_settings(settings, obj.dimension)
    report = chaos_rate_study(
        cfg,
        obj,
        dom,
        spec.options["n_list"],
        spec.options["n_ref"],
        int(settings["runs"]),
        workers=spec.workers,
    )
    header = {
        **cfg.snapshot(),
        "objective": obj.name,
        "n_ref": report.n_ref,
        "replicas": report.replicas,
    }
    write_report(rate_study_frame(report), spec.out / "report.csv", header)
    click.echo(f"slope: {report.slope:.4f} ± {report.slope_stderr:.4f}")
