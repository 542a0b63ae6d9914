from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "RATEBOUND_THREADS"


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    cap = os.cpu_count() or 1
    if raw.strip():
        try:
            return max(1, min(int(raw), cap))
        except ValueError:
            return 1
    return min(4, cap)


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map preserving input order; threads only help numpy-heavy work."""
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
