"""Bench command implementation."""

import logging

import click

from rcbo.commands.utils import (
    RunSpec,
    build_spec,
    common_options,
    dispatch,
    merge_settings,
    register_runner,
    require,
)
from rcbo.experiment import reproduce_table, write_report

_logging = logging.getLogger(__name__)

DEFAULT_RUNS = 1000


@click.command()
@click.option("--table", "-t", help="Table id: ackley, heart, rastrigin or rosenbrock")
@click.option("--runs", "-r", type=click.IntRange(min=1), help="Replicas per cell [default: 1000]")
@click.option("--long", "long_rows", is_flag=True, help="Include long-running rows")
@common_options
@click.pass_context
def bench(ctx, table, runs, long_rows, config_path, out, workers, seed):
    """Reproduce a benchmark success-rate table.

    Writes report.csv with one row per cell, the published rate and whether
    the two agree.
    """
    settings = merge_settings(
        ctx, config_path, {"runs": runs, "seed": seed}, {"runs": DEFAULT_RUNS}
    )
    require(ctx, {"table": table}, {"table": "--table"})
    spec = build_spec(
        ctx,
        "bench",
        settings,
        out,
        workers,
        config_path,
        {"table": table, "long": long_rows},
    )
    dispatch(ctx, spec)


@register_runner("bench")
def run_bench(spec: RunSpec) -> None:
    table = spec.options["table"]
    runs = int(spec.settings["runs"])
    seed = int(spec.settings["seed"])
    frame = reproduce_table(
        table, runs, seed=seed, workers=spec.workers, long=spec.options["long"]
    )
    write_report(
        frame,
        spec.out / "report.csv",
        {"table": table, "runs": runs, "seed": seed, "long": spec.options["long"]},
    )

    disagree = frame[~frame["agrees"]]
    for _, row in disagree.iterrows():
        _logging.warning(
            f"{table} [{row['panel']}] d={row['d']} N={row['N']} K={row['K']}: "
            f"rate {row['rate']:.3f} vs published {row['reference_rate']:.3f}"
        )
    click.echo(
        f"{table}: {len(frame) - len(disagree)}/{len(frame)} cells agree with the published rates"
    )
