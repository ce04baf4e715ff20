"""Data loader for the bundled benchmark tables.

The tables in ``data/benchmarks.json`` hold per-table solver settings, the
grid of particle counts and row values, and the published success rates used
to judge agreement.

Caching Strategy:
- Data is loaded once on first access and cached in a module-level variable
- Use clear_cache() to force a reload (tests do this between cases)
"""

import json
from pathlib import Path

from .config import ConfigError
from .errors import format_field_error
from .experiment.models import BenchmarkTable, TablePanel

# Module-level cache
_tables_cache: dict[str, BenchmarkTable] | None = None


def _get_data_dir() -> Path:
    """Get path to bundled data directory."""
    return Path(__file__).parent / "data"


def _load_json_file(path: Path) -> dict:
    """Load and parse a JSON file with error handling.

    Raises:
        ConfigError: If file cannot be read or contains invalid JSON
    """
    if not path.exists():
        raise ConfigError(f"Data file not found: {path}")
    if not path.is_file():
        raise ConfigError(f"Data path is not a file: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Failed to load data file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Data file {path} must contain a JSON object")
    return data


def _require_str_field(data: dict, field: str, entity_name: str) -> None:
    if field not in data:
        raise ConfigError(f"{entity_name} missing required field: {field}")
    if not isinstance(data[field], str) or not data[field].strip():
        raise ConfigError(format_field_error(entity_name, field, "must be a non-empty string"))


def _require_number_field(data: dict, field: str, entity_name: str) -> None:
    if field not in data:
        raise ConfigError(f"{entity_name} missing required field: {field}")
    value = data[field]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(format_field_error(entity_name, field, "must be a number"))


def _require_int_list(data: dict, field: str, entity_name: str) -> None:
    """Validate a required non-empty list of positive integers.

    Raises:
        ConfigError: If missing, empty, or holding anything but positive ints
    """
    if field not in data:
        raise ConfigError(f"{entity_name} missing required field: {field}")
    values = data[field]
    if not isinstance(values, list) or not values:
        raise ConfigError(format_field_error(entity_name, field, "must be a non-empty array"))
    for i, item in enumerate(values):
        if isinstance(item, bool) or not isinstance(item, int) or item < 1:
            raise ConfigError(f"{entity_name} {field}[{i}] must be a positive integer")


def _optional_field(data: dict, field: str, entity_name: str, field_type: type) -> None:
    if field in data and data[field] is not None:
        if not isinstance(data[field], field_type):
            raise ConfigError(
                format_field_error(entity_name, field, f"must be a {field_type.__name__} or null")
            )


def _validate_panel_data(data: dict, entity_name: str) -> None:
    _require_str_field(data, "label", entity_name)
    _require_str_field(data, "scheme", entity_name)
    _optional_field(data, "steps", entity_name, int)
    _optional_field(data, "repelling", entity_name, str)
    rates = data.get("rates")
    if not isinstance(rates, list) or not all(isinstance(r, list) for r in rates):
        raise ConfigError(format_field_error(entity_name, "rates", "must be an array of arrays"))
    for row in rates:
        for rate in row:
            if isinstance(rate, bool) or not isinstance(rate, (int, float)):
                raise ConfigError(f"{entity_name} rates must be numbers")
            if not 0 <= rate <= 1:
                raise ConfigError(f"{entity_name} rates must lie in [0, 1]")


def _validate_table_data(data: dict, table_name: str) -> None:
    """Validate one table entry before creating the BenchmarkTable.

    Raises:
        ConfigError: If validation fails
    """
    entity = f"Table '{table_name}'"
    for field in ("description", "objective", "beta", "sigma", "row_key"):
        _require_str_field(data, field, entity)
    for field in ("alpha", "eps"):
        _require_number_field(data, field, entity)
    _require_int_list(data, "rows", entity)
    _require_int_list(data, "particles", entity)
    if not isinstance(data.get("domain"), dict):
        raise ConfigError(format_field_error(entity, "domain", "must be an object"))
    if not isinstance(data.get("panels"), list) or not data["panels"]:
        raise ConfigError(format_field_error(entity, "panels", "must be a non-empty array"))
    for i, panel in enumerate(data["panels"]):
        if not isinstance(panel, dict):
            raise ConfigError(f"{entity} panels[{i}] must be an object")
        _validate_panel_data(panel, f"{entity} panels[{i}]")


def get_tables() -> dict[str, BenchmarkTable]:
    """Load all benchmark tables from the bundled data file.

    Returns:
        Dictionary mapping table id to BenchmarkTable

    Raises:
        ConfigError: If the file cannot be loaded or the data is invalid
    """
    global _tables_cache

    if _tables_cache is not None:
        return _tables_cache

    raw_data = _load_json_file(_get_data_dir() / "benchmarks.json")
    if not isinstance(raw_data.get("tables"), dict):
        raise ConfigError("Invalid benchmarks data file: 'tables' must be an object")

    tables = {}
    for table_name, table_data in raw_data["tables"].items():
        if not isinstance(table_data, dict):
            raise ConfigError(
                f"Invalid benchmarks data file: '{table_name}' must be an object"
            )
        _validate_table_data(table_data, table_name)

        panels = [
            TablePanel(
                label=p["label"],
                scheme=p["scheme"],
                rates=[[float(r) for r in row] for row in p["rates"]],
                steps=p.get("steps"),
                repelling=p.get("repelling"),
            )
            for p in table_data["panels"]
        ]
        try:
            tables[table_name] = BenchmarkTable(
                name=table_name,
                description=table_data["description"],
                objective=table_data["objective"],
                domain=dict(table_data["domain"]),
                alpha=float(table_data["alpha"]),
                beta=table_data["beta"],
                sigma=table_data["sigma"],
                eps=float(table_data["eps"]),
                row_key=table_data["row_key"],
                rows=list(table_data["rows"]),
                particles=list(table_data["particles"]),
                panels=panels,
                dimension=table_data.get("dimension"),
                h=table_data.get("h"),
                horizon=table_data.get("horizon"),
                long_rows=list(table_data.get("long_rows", [])),
                tolerance=float(table_data.get("tolerance", 0.05)),
                saturated_floor=float(table_data.get("saturated_floor", 0.97)),
            )
        except ValueError as e:
            raise ConfigError(f"Table '{table_name}': {e}") from e

    _tables_cache = tables
    return tables


def get_table(table_id: str) -> BenchmarkTable:
    """Get one table by id.

    Raises:
        ConfigError: If the id is unknown
    """
    tables = get_tables()
    if table_id not in tables:
        raise ConfigError(
            f"unknown table '{table_id}', expected one of {', '.join(sorted(tables))}"
        )
    return tables[table_id]


def clear_cache() -> None:
    """Clear cached data to force reload on next access."""
    global _tables_cache
    _tables_cache = None


__all__ = [
    "get_tables",
    "get_table",
    "clear_cache",
]
