"""Configuration loading and conversion into solver, domain and objective objects.

Config files are flat TOML: plain keys plus dotted ``domain.*`` keys. Nested
tables are flattened so ``[domain]`` blocks and dotted keys are equivalent.
"""

import difflib
import math
import re
import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from .domain import DOMAIN_KINDS, Ball, Box, FeasibleDomain, HeartRegion
from .dynamics import Scheme, SolverConfig
from .objective import OBJECTIVE_NAMES, Objective, get_objective


class ConfigError(Exception):
    """Raised when config loading, parsing or validation fails.

    Syntax errors carry the line, column and a caret under the offending text.
    """

    pass


KNOWN_KEYS = frozenset(
    {
        "objective",
        "dimension",
        "scheme",
        "alpha",
        "beta",
        "sigma",
        "repelling",
        "h",
        "steps",
        "particles",
        "seed",
        "penalty_epsilon",
        "domain.kind",
        "domain.center",
        "domain.radius",
        "domain.lower",
        "domain.upper",
        "runs",
        "eps",
        "reference",
        "preset",
        "burn_in",
        "thin",
        "samples",
    }
)

_TOML_POSITION = re.compile(r"at line (\d+), column (\d+)")


def _format_syntax_error(original_text: str, error: tomllib.TOMLDecodeError) -> str:
    """Format a TOML syntax error with the offending line and a caret."""
    message = str(error)
    match = _TOML_POSITION.search(message)
    if not match:
        return f"Config syntax error: {message}"

    line_num, col_num = int(match.group(1)), int(match.group(2))
    msg_parts = [f"Config syntax error at line {line_num}, col {col_num}: {message}"]
    lines = original_text.split("\n")
    if 1 <= line_num <= len(lines):
        msg_parts.append(lines[line_num - 1])
        msg_parts.append(" " * (col_num - 1) + "^")
    return "\n".join(msg_parts)


def flatten(data: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    """Flatten nested tables into dotted keys."""
    flat: dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def check_known_keys(settings: dict[str, Any]) -> None:
    """Reject keys outside the recognised set, suggesting the closest match.

    Raises:
        ConfigError: On the first unknown key
    """
    for key in sorted(settings):
        if key in KNOWN_KEYS:
            continue
        close = difflib.get_close_matches(key, KNOWN_KEYS, n=1)
        hint = f"; did you mean '{close[0]}'?" if close else ""
        raise ConfigError(f"unknown config key '{key}'{hint}")


def load_config(path_or_text: Path | str) -> dict[str, Any]:
    """Load a TOML config file (or TOML text) into a flat settings dict.

    Args:
        path_or_text: Path to a TOML file, or the TOML text itself

    Returns:
        Flat dict with dotted keys

    Raises:
        ConfigError: If the file cannot be read, is not valid TOML or has
            unknown keys
        TypeError: If path_or_text is neither Path nor str
    """
    if isinstance(path_or_text, Path):
        file_path = path_or_text
        try:
            original_text = file_path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ConfigError(f"Config file not found: {file_path}")
        except PermissionError:
            raise ConfigError(f"Permission denied reading config file: {file_path}")
        except UnicodeDecodeError:
            raise ConfigError(f"Config file is not valid UTF-8: {file_path}")
        except OSError as e:
            raise ConfigError(f"Error reading config file {file_path}: {e}")
    elif isinstance(path_or_text, str):
        original_text = path_or_text
    else:
        raise TypeError(
            f"path_or_text must be Path or str, got {type(path_or_text).__name__}"
        )

    try:
        data = tomllib.loads(original_text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(_format_syntax_error(original_text, e)) from e

    settings = flatten(data)
    check_known_keys(settings)
    return settings


def parse_vector(value: Any, field: str) -> np.ndarray:
    """Accept ``"0,0"``, ``[0, 0]`` or a bare number as a 1-D point.

    Raises:
        ConfigError: If the value cannot be read as finite numbers
    """
    try:
        if isinstance(value, str):
            parts = [p for p in value.replace(" ", "").split(",") if p]
            arr = np.array([float(p) for p in parts])
        else:
            arr = np.atleast_1d(np.asarray(value, dtype=float))
    except (TypeError, ValueError):
        raise ConfigError(f"{field} must be a comma-separated list of numbers")
    if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ConfigError(f"{field} must be a non-empty list of finite numbers")
    return arr


def _number(settings: dict[str, Any], key: str, kind: type = float) -> Any:
    value = settings[key]
    if isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    try:
        result = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if kind is int and isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if kind is float and not math.isfinite(result):
        raise ConfigError(f"{key} must be finite")
    return result


def _require(settings: dict[str, Any], key: str) -> Any:
    if settings.get(key) is None:
        raise ConfigError(f"Missing required setting: {key}")
    return settings[key]


def domain_from_settings(
    settings: dict[str, Any], dimension: int | None = None
) -> FeasibleDomain:
    """Build the feasible domain from ``domain.*`` settings.

    A ball without ``domain.center`` is centred at the origin of the given
    dimension.

    Raises:
        ConfigError: On a missing or invalid field
    """
    kind = str(_require(settings, "domain.kind")).lower()
    if kind not in DOMAIN_KINDS:
        raise ConfigError(
            f"domain.kind must be one of {', '.join(DOMAIN_KINDS)}, got '{kind}'"
        )

    try:
        if kind == "ball":
            _require(settings, "domain.radius")
            radius = _number(settings, "domain.radius")
            if settings.get("domain.center") is not None:
                center = parse_vector(settings["domain.center"], "domain.center")
            elif dimension is not None:
                center = np.zeros(dimension)
            else:
                raise ConfigError("ball domain needs domain.center or a dimension")
            dom: FeasibleDomain = Ball(center, radius)
        elif kind == "box":
            lower = parse_vector(_require(settings, "domain.lower"), "domain.lower")
            upper = parse_vector(_require(settings, "domain.upper"), "domain.upper")
            if lower.shape != upper.shape:
                raise ConfigError("domain.lower and domain.upper must have the same length")
            dom = Box(lower, upper)
        else:
            dom = HeartRegion()
    except ValueError as e:
        raise ConfigError(f"domain: {e}") from e

    if dimension is not None and dom.dimension != dimension:
        raise ConfigError(
            f"domain dimension {dom.dimension} does not match objective dimension {dimension}"
        )
    return dom


def objective_from_settings(settings: dict[str, Any], **kwargs: Any) -> Objective:
    """Build the named objective; extra keyword arguments go to ``get_objective``.

    Raises:
        ConfigError: If the name is unknown or the dimension does not fit
    """
    name = str(_require(settings, "objective")).lower()
    if name not in OBJECTIVE_NAMES:
        raise ConfigError(
            f"objective must be one of {', '.join(OBJECTIVE_NAMES)}, got '{name}'"
        )
    dimension = None
    if settings.get("dimension") is not None:
        dimension = _number(settings, "dimension", int)
    if dimension is None and name not in ("ackley", "rosenbrock", "townsend", "merton"):
        center = settings.get("domain.center") or settings.get("domain.lower")
        if center is not None:
            dimension = parse_vector(center, "domain.center").size
    try:
        return get_objective(name, dimension, **kwargs)
    except ValueError as e:
        raise ConfigError(str(e)) from e


DEFAULT_REPELLING = "invsq:1"


def _repelling(value: Any) -> Any:
    if value is None or value is False or str(value).lower() in ("off", "none"):
        return None
    if value is True or str(value).lower() == "on":
        return DEFAULT_REPELLING
    return value


def solver_from_settings(settings: dict[str, Any]) -> SolverConfig:
    """Build a SolverConfig from flat settings.

    Raises:
        ConfigError: If a required key is missing or a value is invalid
    """
    scheme_name = str(_require(settings, "scheme")).lower()
    try:
        scheme = Scheme(scheme_name)
    except ValueError:
        raise ConfigError(
            f"scheme must be one of {', '.join(s.value for s in Scheme)}, got '{scheme_name}'"
        )

    for key in ("alpha", "beta", "sigma", "h", "steps", "particles", "seed"):
        _require(settings, key)

    epsilon = None
    if settings.get("penalty_epsilon") is not None:
        epsilon = _number(settings, "penalty_epsilon")

    try:
        return SolverConfig(
            scheme=scheme,
            alpha=_number(settings, "alpha"),
            beta=settings["beta"],
            sigma=settings["sigma"],
            h=_number(settings, "h"),
            steps=_number(settings, "steps", int),
            particles=_number(settings, "particles", int),
            seed=_number(settings, "seed", int),
            repelling=_repelling(settings.get("repelling")),
            penalty_epsilon=epsilon,
        )
    except ValueError as e:
        raise ConfigError(f"solver: {e}") from e


__all__ = [
    "ConfigError",
    "KNOWN_KEYS",
    "load_config",
    "flatten",
    "check_known_keys",
    "parse_vector",
    "domain_from_settings",
    "objective_from_settings",
    "solver_from_settings",
]
