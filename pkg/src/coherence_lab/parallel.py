"""Order-preserving map with a thread cap from ``COHERENCE_LAB_THREADS``."""

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "COHERENCE_LAB_THREADS"

# below this many items a thread pool costs more than it saves
_MIN_ITEMS = 64


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{ENV_VAR} must be >= 0, got {n}")
    if n == 0:
        n = min(os.cpu_count() or 1, 8)
    return n


def parallel_map(fn, items):
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) < _MIN_ITEMS:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
