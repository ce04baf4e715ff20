"""Optimize command implementation."""

from typing import Any

import click

from rcbo.commands.utils import (
    ConflictingOptions,
    RunSpec,
    build_spec,
    common_options,
    dispatch,
    echo_vector,
    merge_settings,
    register_runner,
    require,
)
from rcbo.config import (
    domain_from_settings,
    objective_from_settings,
    parse_vector,
    solver_from_settings,
)
from rcbo.domain import DOMAIN_KINDS
from rcbo.dynamics import NoiseStream, Scheme, run_cbo
from rcbo.experiment import (
    THETA_TRUE,
    success_frame,
    success_rate,
    trace_frame,
    write_report,
)
from rcbo.objective import OBJECTIVE_NAMES, generate_observations

DEFAULT_EPS = 0.1

REQUIRED = {
    "objective": "--objective",
    "domain.kind": "--domain",
    "scheme": "--scheme",
    "particles": "-N",
    "alpha": "--alpha",
    "beta": "--beta",
    "sigma": "--sigma",
    "h": "--h",
    "steps": "--steps",
}

_DOMAIN_FLAGS = {
    "ball": {"domain.radius": "--radius", "domain.center": "--center"},
    "box": {"domain.lower": "--lower", "domain.upper": "--upper"},
    "levelset-heart": {},
}


def _check_conflicts(ctx: click.Context, settings: dict[str, Any], flags: dict[str, Any]):
    kind = str(settings["domain.kind"]).lower()
    allowed = _DOMAIN_FLAGS.get(kind, {})
    for other in _DOMAIN_FLAGS.values():
        for key, flag in other.items():
            if flags.get(key) is not None and key not in allowed:
                raise ConflictingOptions(f"--domain {kind}", flag, ctx)
    if flags.get("penalty_epsilon") is not None and settings["scheme"] == "projection":
        raise ConflictingOptions("--scheme projection", "--penalty-epsilon", ctx)
    if flags.get("eps") is not None and settings.get("runs") is None:
        raise ConflictingOptions("--eps", "a single run (pass --runs)", ctx)


@click.command()
@click.option("--objective", type=click.Choice(OBJECTIVE_NAMES), help="Objective function")
@click.option("--dimension", "-d", type=click.IntRange(min=1), help="Search-space dimension")
@click.option(
    "--domain", "domain_kind", type=click.Choice(DOMAIN_KINDS), help="Feasible domain"
)
@click.option("--radius", type=float, help="Ball radius")
@click.option("--center", help="Ball center, e.g. 0,0")
@click.option("--lower", help="Box lower corner, e.g. -1,-1")
@click.option("--upper", help="Box upper corner, e.g. 1,1")
@click.option("--scheme", type=click.Choice([s.value for s in Scheme]), help="Boundary scheme")
@click.option("--particles", "-N", type=click.IntRange(min=1), help="Ensemble size")
@click.option("--alpha", type=float, help="Consensus weight exponent")
@click.option("--beta", help="Drift schedule, e.g. 1 or linear:0:10")
@click.option("--sigma", help="Noise schedule, e.g. 4 or expdecay:10:2.3026")
@click.option("--h", type=float, help="Step size")
@click.option("--steps", "-K", type=click.IntRange(min=0), help="Number of steps")
@click.option("--repelling", help="Repelling schedule, 'on' or 'off'")
@click.option("--penalty-epsilon", type=float, help="Penalty strength (default: h)")
@click.option("--runs", type=click.IntRange(min=1), help="Replicas for a success rate")
@click.option("--eps", type=float, help="Success radius (default 0.1)")
@click.option("--reference", help="Target point for the success rate")
@click.option("--trace", is_flag=True, help="Write the consensus trajectory to trace.csv")
@common_options
@click.pass_context
def optimize(ctx, config_path, out, workers, seed, trace, domain_kind, **flags):
    """Minimize an objective over a feasible domain with reflected CBO.

    Prints the final consensus point and its objective value. With --runs,
    also estimates the success rate over seeded replicas.
    """
    flags = {
        key if key not in ("radius", "center", "lower", "upper") else f"domain.{key}": value
        for key, value in flags.items()
    }
    flags["domain.kind"] = domain_kind
    flags["seed"] = seed
    settings = merge_settings(ctx, config_path, flags)
    require(ctx, settings, REQUIRED)
    _check_conflicts(ctx, settings, flags)
    spec = build_spec(
        ctx, "optimize", settings, out, workers, config_path, {"trace": trace}
    )
    dispatch(ctx, spec)


def _header(settings: dict[str, Any], cfg_snapshot: dict[str, Any], name: str) -> dict:
    domain = {k: str(v) for k, v in settings.items() if k.startswith("domain.")}
    return {**cfg_snapshot, **domain, "objective": name}


@register_runner("optimize")
def run_optimize(spec: RunSpec) -> None:
    settings = spec.settings
    cfg = solver_from_settings(settings)
    extra = {}
    if str(settings["objective"]).lower() == "merton":
        seed = NoiseStream(cfg.seed).child_seed()
        extra["observations"] = generate_observations(THETA_TRUE, seed)
        extra["theta_true"] = THETA_TRUE
    obj = objective_from_settings(settings, **extra)
    dom = domain_from_settings(settings, obj.dimension)

    result = run_cbo(cfg, obj, dom, record_trace=spec.options.get("trace", False))
    echo_vector("consensus", result.consensus)
    click.echo(f"value: {result.value:.10g}")

    header = _header(settings, cfg.snapshot(), obj.name)
    if result.trace is not None:
        write_report(trace_frame(result.trace, cfg.h), spec.out / "trace.csv", header)

    if settings.get("runs") is not None:
        eps = float(settings.get("eps") or DEFAULT_EPS)
        reference = None
        if settings.get("reference") is not None:
            reference = parse_vector(settings["reference"], "reference")
        report = success_rate(
            cfg, obj, dom, int(settings["runs"]), eps, reference, workers=spec.workers
        )
        click.echo(
            f"success rate: {report.rate:.4f} "
            f"({report.successes}/{report.runs}, 95% CI [{report.ci_lo:.4f}, {report.ci_hi:.4f}])"
        )
        write_report(success_frame(report), spec.out / "report.csv", {**header, "eps": eps})
