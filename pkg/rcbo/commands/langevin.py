"""Langevin command implementation."""

from dataclasses import replace
from typing import Any

import click
import numpy as np

from rcbo.commands.utils import (
    EXIT_NUMERICAL,
    RunSpec,
    build_spec,
    dispatch,
    merge_settings,
    register_runner,
    require,
    shared_options,
)
from rcbo.config import ConfigError, parse_vector
from rcbo.domain import Box
from rcbo.errors import format_error
from rcbo.experiment import (
    PRESETS,
    LangevinPreset,
    get_preset,
    histogram_frame,
    langevin_invariant_check,
    w1_frame,
    write_report,
)


def preset_settings(preset: LangevinPreset) -> dict[str, Any]:
    """Run parameters of a preset, as overridable settings."""
    return {
        "sigma": preset.sigma,
        "h": preset.h,
        "particles": preset.particles,
        "burn_in": preset.burn_in,
        "thin": preset.thin,
        "samples": preset.samples,
        "domain.lower": preset.lower,
        "domain.upper": preset.upper,
    }


def _endpoint(settings: dict[str, Any], key: str) -> float:
    value = parse_vector(settings[key], key)
    if value.size != 1:
        raise ConfigError(f"{key} must be a single number for the 1-D interval")
    return float(value[0])


def _count(settings: dict[str, Any], key: str) -> int:
    value = settings[key]
    if isinstance(value, bool) or not float(value).is_integer():
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return int(value)


@click.command()
@click.option("--preset", "-p", type=click.Choice(list(PRESETS)), help="Test configuration")
@click.option("--sigma", type=float, help="Noise strength [default: from preset]")
@click.option("--h", type=float, help="Step size [default: from preset]")
@click.option("--particles", "-N", type=click.IntRange(min=1), help="Ensemble size")
@click.option("--burn-in", "burn_in", type=click.IntRange(min=0), help="Steps before sampling")
@click.option("--thin", type=click.IntRange(min=1), help="Steps between pooled snapshots")
@click.option("--samples", type=click.IntRange(min=1), help="Pooled positions")
@click.option("--lower", type=float, help="Left end of the interval")
@click.option("--upper", type=float, help="Right end of the interval")
@shared_options
@click.pass_context
def langevin(ctx, lower, upper, config_path, out, seed, **flags):
    """Compare a mean-field Langevin ensemble with its invariant density.

    The preset fixes the potentials; its run parameters and interval can be
    overridden by flags or the config file. Writes histogram.csv (empirical
    and oracle bin masses) and w1_decay.csv (Wasserstein distance to the
    oracle over time). Exits with status 2 when the histogram distance is
    above tolerance.
    """
    flags["domain.lower"] = lower
    flags["domain.upper"] = upper
    flags["seed"] = seed
    settings = merge_settings(ctx, config_path, flags)
    require(ctx, settings, {"preset": "--preset"})
    spec = build_spec(ctx, "langevin", settings, out, 1, config_path)
    dispatch(ctx, spec)


@register_runner("langevin")
def run_langevin_check(spec: RunSpec) -> int | None:
    name = str(spec.settings["preset"])
    preset = get_preset(name)
    settings = {**preset_settings(preset), **spec.settings}
    seed = int(settings["seed"])

    try:
        sigma, h = float(settings["sigma"]), float(settings["h"])
    except (TypeError, ValueError):
        raise ConfigError("sigma and h must be plain numbers for the Langevin check")
    particles = _count(settings, "particles")
    burn_in, thin, samples = (_count(settings, k) for k in ("burn_in", "thin", "samples"))
    lower, upper = _endpoint(settings, "domain.lower"), _endpoint(settings, "domain.upper")

    cfg = replace(preset.config(seed), sigma_noise=sigma, h=h, particles=particles)
    dom = Box(np.array([lower]), np.array([upper]))
    report = langevin_invariant_check(
        cfg, dom, burn_in=burn_in, samples=samples, thin=thin, preset=name
    )

    header = {
        "preset": name,
        "seed": seed,
        "sigma": sigma,
        "lower": lower,
        "upper": upper,
        "h": h,
        "particles": particles,
        "burn_in": burn_in,
        "thin": thin,
        "samples": report.samples,
        "oracle_iterations": report.oracle_iterations,
        "l1_distance": report.l1_distance,
        "tolerance": report.tolerance,
    }
    write_report(histogram_frame(report), spec.out / "histogram.csv", header)
    write_report(w1_frame(report), spec.out / "w1_decay.csv", header)
    click.echo(f"{name}: L1 distance {report.l1_distance:.4f} (tolerance {report.tolerance})")
    if not report.passed:
        click.echo(format_error(f"{name}: histogram does not match the invariant density"), err=True)
        return EXIT_NUMERICAL
    return None
