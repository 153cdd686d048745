"""Ordered thread-pool map with a schedule-independent result order."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def ordered_map(fn, items, threads: int = 1) -> list:
    """``[fn(x) for x in items]`` evaluated on ``threads`` workers.

    Results come back in input order, so any reduction performed by the
    caller in that order is independent of the thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def chunks(n: int, size: int) -> list:
    """Fixed ``(start, stop)`` chunks of ``range(n)``."""
    return [(a, min(a + size, n)) for a in range(0, n, size)]
