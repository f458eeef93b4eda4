"""Thread-count plumbing and deterministic mode.

``MODSPACE_THREADS`` sets how many family members are evaluated concurrently.
Deterministic mode pins BLAS/FFT-backend pools to one thread so floating-point
reductions happen in a fixed order no matter how many workers run.
"""
from __future__ import annotations

import contextlib
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    raw = os.environ.get("MODSPACE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"MODSPACE_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Ordered map over ``items`` using ``thread_count()`` workers."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@contextlib.contextmanager
def deterministic(enabled: bool = True):
    if not enabled:
        yield
        return
    from threadpoolctl import threadpool_limits

    with threadpool_limits(limits=1):
        yield
