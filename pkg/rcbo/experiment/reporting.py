"""CSV report writing and reading.

Every report starts with ``# key = value`` lines holding the sorted config
snapshot, followed by the table itself. Floats are written with 17
significant digits so reading a report back reproduces every number exactly.
Nothing time-dependent is written, so identical runs give identical files.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from .models import DecayReport, InvariantReport, RateStudyReport, SuccessReport

_logging = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _format_value(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_report(
    frame: pd.DataFrame, path: Path, config: dict | None = None
) -> Path:
    """Write ``frame`` as CSV under a ``#`` comment header of config entries."""
    path = Path(path)
    header = "".join(
        f"# {key} = {_format_value(config[key])}\n" for key in sorted(config or {})
    )
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    path.write_text(header + body, encoding="utf-8")
    _logging.info(f"wrote {path}")
    return path


def read_report(path: Path) -> tuple[pd.DataFrame, dict[str, str]]:
    """Read a report written by ``write_report``.

    Returns:
        The table and the header entries as strings
    """
    path = Path(path)
    config: dict[str, str] = {}
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition("=")
            config[key.strip()] = value.strip()
    frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    return frame, config


def success_frame(report: SuccessReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "runs": report.runs,
                "successes": report.successes,
                "failures": report.failures,
                "rate": report.rate,
                "ci_lo": report.ci_lo,
                "ci_hi": report.ci_hi,
            }
        ]
    )


def trace_frame(trace: np.ndarray, h: float) -> pd.DataFrame:
    """Consensus trajectory with one column per coordinate."""
    frame = pd.DataFrame(trace, columns=[f"x{k}" for k in range(trace.shape[1])])
    frame.insert(0, "t", h * np.arange(len(trace)))
    frame.insert(0, "step", np.arange(len(trace)))
    return frame


def rate_study_frame(report: RateStudyReport) -> pd.DataFrame:
    frame = pd.DataFrame(
        {"N": report.n_values, "error": report.errors, "error_std": report.error_std}
    )
    frame["slope"] = report.slope
    frame["slope_stderr"] = report.slope_stderr
    return frame


def decay_frame(report: DecayReport) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "t": report.times,
            "variance": report.variance,
            "bound": report.bound,
        }
    )


def histogram_frame(report: InvariantReport) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "bin_lo": report.bin_edges[:-1],
            "bin_hi": report.bin_edges[1:],
            "empirical": report.empirical_mass,
            "oracle": report.oracle_mass,
        }
    )


def w1_frame(report: InvariantReport) -> pd.DataFrame:
    return pd.DataFrame({"t": report.w1_times, "w1": report.w1_values})
