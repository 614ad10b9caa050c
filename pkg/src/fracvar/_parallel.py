"""Ordered, optionally threaded map controlled by ``FRACVAR_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("FRACVAR_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items) -> list:
    """``[fn(i) for i in items]``, evaluated on up to FRACVAR_THREADS threads."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
