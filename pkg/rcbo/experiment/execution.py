"""Replica execution on a process pool."""

import logging
import os
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import TypeVar

_logging = logging.getLogger(__name__)

T = TypeVar("T")


def default_workers() -> int:
    """Leave one core free."""
    return max(1, (os.cpu_count() or 1) - 1)


def run_replicas(fn: Callable[[int], T], count: int, workers: int = 1) -> list[T]:
    """Call ``fn(replicate)`` for every replicate index and return results in index order.

    ``fn`` must be picklable when ``workers > 1`` (a module-level function or a
    ``functools.partial`` of one). Each replicate seeds itself from its index,
    so the results do not depend on ``workers``.

    Raises:
        ValueError: If count or workers is not positive
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")

    if workers == 1 or count == 1:
        return [fn(r) for r in range(count)]

    max_workers = min(workers, count)
    _logging.debug(f"running {count} replicas on {max_workers} workers")
    results: list[T | None] = [None] * count
    with ProcessPoolExecutor(max_workers=max_workers) as executor:
        future_to_replicate = {executor.submit(fn, r): r for r in range(count)}
        for future in as_completed(future_to_replicate):
            results[future_to_replicate[future]] = future.result()
    return results  # type: ignore[return-value]
