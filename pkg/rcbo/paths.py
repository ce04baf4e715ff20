"""Output path helpers for rcbo."""

import os
from pathlib import Path

from .config import ConfigError

DEFAULT_OUTPUT_DIR = Path("rcbo-out")


def get_output_dir(path: Path | str | None = None, create: bool = True) -> Path:
    """Resolve the report directory and make sure it is writable.

    Priority:
    1. Explicit ``path`` (the ``--out`` flag)
    2. RCBO_OUT environment variable (if set)
    3. ./rcbo-out

    Raises:
        ConfigError: If the directory cannot be created or written to
    """
    if path is not None:
        out = Path(path)
    elif "RCBO_OUT" in os.environ:
        out = Path(os.environ["RCBO_OUT"])
    else:
        out = DEFAULT_OUTPUT_DIR

    if out.exists() and not out.is_dir():
        raise ConfigError(f"Output path is not a directory: {out}")
    if create:
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"Cannot create output directory {out}: {e}") from e
    if out.exists() and not os.access(out, os.W_OK):
        raise ConfigError(f"Output directory is not writable: {out}")
    return out
