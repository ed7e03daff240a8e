"""Order-preserving parallel map capped by ``POLYSTAB_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ValidationError


def worker_count() -> int:
    raw = os.environ.get("POLYSTAB_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ValidationError(f"POLYSTAB_THREADS must be a positive integer, got {raw!r}")
    return n


def pmap(fn, items):
    """``list(map(fn, items))``, fanned out over threads when allowed.

    LAPACK releases the GIL, so threads give real speedups for the per-sample
    SVDs in sweeps. Results always come back in input order.
    """
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
