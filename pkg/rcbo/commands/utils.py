"""Shared helpers for commands: run specs, option merging and error mapping."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import click
from click.core import ParameterSource

from rcbo import setup_logging
from rcbo.config import ConfigError, load_config
from rcbo.errors import NumericalError, format_error
from rcbo.paths import get_output_dir

_logging = logging.getLogger(__name__)

SUBCOMMANDS = ("optimize", "bench", "chaos", "decay", "langevin", "invert")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


class MissingRequired(click.UsageError):
    """A setting needed by the command is neither a flag nor in the config file."""

    exit_code = EXIT_CONFIG

    def __init__(self, key: str, flag: str | None = None, ctx: click.Context | None = None):
        flag = flag or "--" + key.split(".")[-1].replace("_", "-")
        super().__init__(
            f"missing required setting '{key}'; pass {flag} or set it in --config", ctx
        )


class ConflictingOptions(click.UsageError):
    """Two options were given that cannot be used together."""

    exit_code = EXIT_CONFIG

    def __init__(self, first: str, second: str, ctx: click.Context | None = None):
        super().__init__(f"{first} cannot be combined with {second}", ctx)


class BadConfigFile(click.UsageError):
    """The --config file is unreadable, malformed or has unknown keys."""

    exit_code = EXIT_CONFIG


@dataclass
class RunSpec:
    """A fully resolved command line: what to run, with which settings, where."""

    subcommand: str
    settings: dict[str, Any]
    out: Path
    workers: int = 1
    verbosity: int = 0
    config_path: Path | None = None
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"subcommand must be one of {', '.join(SUBCOMMANDS)}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def resolved(self) -> dict[str, Any]:
        """Settings and command options merged, for logging."""
        return {**self.settings, **self.options}


Runner = Callable[[RunSpec], int | None]
_runners: dict[str, Runner] = {}


def register_runner(name: str) -> Callable[[Runner], Runner]:
    """Register the function that carries out a subcommand."""

    def decorator(fn: Runner) -> Runner:
        _runners[name] = fn
        return fn

    return decorator


def shared_options(fn: Callable) -> Callable:
    """Options shared by every subcommand."""
    fn = click.option(
        "--seed",
        type=click.IntRange(min=0),
        envvar="RCBO_SEED",
        help="Master seed (env: RCBO_SEED)",
    )(fn)
    fn = click.option(
        "--out",
        "-o",
        type=click.Path(file_okay=False, path_type=Path),
        help="Report directory (env: RCBO_OUT, default ./rcbo-out)",
    )(fn)
    fn = click.option(
        "--config",
        "-c",
        "config_path",
        type=click.Path(dir_okay=False, path_type=Path),
        help="TOML config file; flags take precedence",
    )(fn)
    return fn


def common_options(fn: Callable) -> Callable:
    """Shared options plus --workers, for commands that run replicas."""
    fn = click.option(
        "--workers",
        "-j",
        type=click.IntRange(min=1),
        default=1,
        show_default=True,
        help="Worker processes for replicas",
    )(fn)
    return shared_options(fn)


def merge_settings(
    ctx: click.Context,
    config_path: Path | None,
    flags: dict[str, Any],
    defaults: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Layer defaults, then the config file, then flags that were given.

    The seed is special: a value from RCBO_SEED only applies when neither the
    flag nor the config file sets one.
    """
    settings: dict[str, Any] = dict(defaults or {})
    if config_path is not None:
        try:
            settings.update(load_config(config_path))
        except ConfigError as e:
            raise BadConfigFile(str(e), ctx) from e

    seed = flags.pop("seed", None)
    from_env = ctx.get_parameter_source("seed") == ParameterSource.ENVIRONMENT
    if seed is not None and not (from_env and "seed" in settings):
        settings["seed"] = seed
    settings.setdefault("seed", 0)

    for key, value in flags.items():
        if value is not None:
            settings[key] = value
    return settings


def require(ctx: click.Context, settings: dict[str, Any], keys: dict[str, str]) -> None:
    """Raise MissingRequired for the first absent key; ``keys`` maps key to flag."""
    for key, flag in keys.items():
        if settings.get(key) is None:
            raise MissingRequired(key, flag, ctx)


def resolve_out(ctx: click.Context, out: Path | None) -> Path:
    try:
        return get_output_dir(out, create=False)
    except ConfigError as e:
        raise click.BadParameter(str(e), ctx, param_hint="--out") from e


def build_spec(
    ctx: click.Context,
    subcommand: str,
    settings: dict[str, Any],
    out: Path | None,
    workers: int,
    config_path: Path | None,
    options: dict[str, Any] | None = None,
) -> RunSpec:
    obj = ctx.find_root().obj or {}
    return RunSpec(
        subcommand=subcommand,
        settings=settings,
        out=resolve_out(ctx, out),
        workers=workers,
        verbosity=obj.get("verbosity", 0),
        config_path=config_path,
        options=dict(options or {}),
    )


def dispatch(ctx: click.Context, spec: RunSpec) -> None:
    """Hand the RunSpec back to ``parse_args`` or run it and exit with its status."""
    obj = ctx.find_root().obj
    if obj is not None and obj.get("parse_only"):
        obj["spec"] = spec
        return
    code = execute(spec)
    if code != EXIT_OK:
        ctx.exit(code)


def execute(spec: RunSpec) -> int:
    """Run a resolved spec and map failures to exit codes.

    Returns:
        0 on success, 1 on a configuration error, 2 on a numerical failure
    """
    setup_logging(spec.verbosity)
    resolved = spec.resolved()
    _logging.info(
        f"{spec.subcommand}: "
        + ", ".join(f"{key}={resolved[key]}" for key in sorted(resolved))
        + f", workers={spec.workers}, out={spec.out}"
    )
    runner = _runners[spec.subcommand]
    try:
        spec.out = get_output_dir(spec.out)
        return runner(spec) or EXIT_OK
    except NumericalError as e:
        click.echo(format_error(str(e)), err=True)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as e:
        click.echo(format_error(str(e)), err=True)
        return EXIT_CONFIG


def echo_vector(label: str, values) -> None:
    click.echo(f"{label}: " + ", ".join(format(float(v), ".10g") for v in values))
