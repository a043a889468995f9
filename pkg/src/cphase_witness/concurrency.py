"""Worker sizing and an order-preserving thread pool for independent trials."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import psutil
from loguru import logger

log = logger.bind(component="concurrency")

T = TypeVar("T")
R = TypeVar("R")

# Ceiling for the auto-derived worker count.
_AUTO_CAP = 8


def calculate_max_workers(requested: int = 0) -> int:
    """Number of worker threads to use.

    A positive `requested` is taken as-is; 0 derives it from the physical
    core count (logical count when psutil cannot tell), capped at 8.
    """
    if requested > 0:
        log.debug(f"Using configured max_workers: {requested}")
        return requested
    cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    workers = max(1, min(_AUTO_CAP, cores))
    log.debug(f"Auto-calculated max_workers: {workers} (cores={cores})")
    return workers


def run_trials(fn: Callable[[T], R], items: Sequence[T], max_workers: int = 0) -> list[R]:
    """Apply `fn` to every item and return results in input order.

    Exceptions raised by `fn` propagate to the caller once all submitted
    work has been collected.
    """
    if not items:
        return []
    workers = min(calculate_max_workers(max_workers), len(items))
    if workers == 1:
        return [fn(item) for item in items]

    log.debug(f"run_trials: {len(items)} items on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(fn, item) for item in items]
        return [future.result() for future in futures]


def current_rss_mb() -> float:
    """Resident set size of this process in MiB."""
    return psutil.Process().memory_info().rss / (1024 * 1024)
