"""Replicated experiment harnesses and report output."""

from .chaos import chaos_rate_study
from .decay import decay_rate, variance_decay_check
from .execution import default_workers, run_replicas
from .inverse import THETA_TRUE, invert_merton, parameter_histograms, search_box
from .langevin import (
    PRESETS,
    LangevinPreset,
    OracleDensity,
    get_preset,
    invariant_density,
    langevin_invariant_check,
    run_preset,
)
from .models import (
    BenchmarkTable,
    DecayReport,
    InvariantReport,
    InversionReport,
    RateStudyReport,
    ReplicaOutcome,
    SuccessReport,
    TablePanel,
)
from .reporting import (
    decay_frame,
    histogram_frame,
    rate_study_frame,
    read_report,
    success_frame,
    trace_frame,
    w1_frame,
    write_report,
)
from .success import (
    TABLE_COLUMNS,
    cell_agrees,
    reproduce_table,
    score_replica,
    success_rate,
    summarize,
    table_cells,
    wilson_interval,
)

__all__ = [
    "BenchmarkTable",
    "DecayReport",
    "InvariantReport",
    "InversionReport",
    "RateStudyReport",
    "ReplicaOutcome",
    "SuccessReport",
    "TablePanel",
    "LangevinPreset",
    "OracleDensity",
    "PRESETS",
    "THETA_TRUE",
    "TABLE_COLUMNS",
    "run_replicas",
    "default_workers",
    "wilson_interval",
    "score_replica",
    "summarize",
    "success_rate",
    "cell_agrees",
    "table_cells",
    "reproduce_table",
    "chaos_rate_study",
    "decay_rate",
    "variance_decay_check",
    "invariant_density",
    "get_preset",
    "langevin_invariant_check",
    "run_preset",
    "invert_merton",
    "parameter_histograms",
    "search_box",
    "write_report",
    "read_report",
    "success_frame",
    "trace_frame",
    "rate_study_frame",
    "decay_frame",
    "histogram_frame",
    "w1_frame",
]
