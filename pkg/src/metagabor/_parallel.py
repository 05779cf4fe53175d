"""Thread-pool map capped by the ``MTF_THREADS`` environment variable."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable


def max_threads() -> int:
    """Worker count from ``MTF_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get("MTF_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn: Callable, items: Iterable) -> list:
    """Order-preserving map; results never depend on the thread count."""
    items = list(items)
    k = min(max_threads(), len(items))
    if k <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))
