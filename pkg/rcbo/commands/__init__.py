"""CLI command definitions for rcbo."""

import click

from rcbo import DEBUG, NORMAL, QUIET
from rcbo.commands.bench import bench as bench_command
from rcbo.commands.chaos import chaos as chaos_command
from rcbo.commands.decay import decay as decay_command
from rcbo.commands.invert import invert as invert_command
from rcbo.commands.langevin import langevin as langevin_command
from rcbo.commands.optimize import optimize as optimize_command
from rcbo.commands.utils import (
    ConflictingOptions,
    MissingRequired,
    RunSpec,
    execute,
)


@click.group()
@click.option("--debug", "-v", is_flag=True, help="Log per-step diagnostics")
@click.option("--quiet", "-q", is_flag=True, help="Log warnings and errors only")
@click.pass_context
def cli(ctx, debug, quiet):
    """Reflected consensus-based optimization on constrained domains."""
    if debug and quiet:
        raise ConflictingOptions("--debug", "--quiet", ctx)
    ctx.ensure_object(dict)
    ctx.obj["verbosity"] = DEBUG if debug else QUIET if quiet else NORMAL


# Register all commands
cli.add_command(optimize_command)
cli.add_command(bench_command)
cli.add_command(chaos_command)
cli.add_command(decay_command)
cli.add_command(langevin_command)
cli.add_command(invert_command)


def parse_args(argv: list[str]) -> RunSpec:
    """Parse a command line into a RunSpec without running it.

    Raises:
        click.UsageError: On an unknown flag, a missing setting or
            conflicting options
    """
    obj: dict = {"parse_only": True}
    cli.main(args=list(argv), prog_name="rcbo", standalone_mode=False, obj=obj)
    if "spec" not in obj:
        raise click.UsageError("no command given; see 'rcbo --help'")
    return obj["spec"]


__all__ = [
    "cli",
    "parse_args",
    "execute",
    "RunSpec",
    "MissingRequired",
    "ConflictingOptions",
]


if __name__ == "__main__":
    cli()
