"""Replica fan-out over a thread pool with a fixed chunking, so results never
depend on the thread budget."""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 2048


def default_threads() -> int:
    env = os.environ.get("BEFPP_THREADS")
    if env:
        return max(1, int(env))
    return 1


def map_chunks(fn, reps: int, threads: int | None = None, chunk: int = CHUNK):
    """Call ``fn(r0, r1)`` on fixed replica chunks and concatenate in replica order."""
    bounds = [(r0, min(r0 + chunk, reps)) for r0 in range(0, reps, chunk)]
    if not bounds:
        return np.empty(0)
    threads = threads or default_threads()
    if threads <= 1 or len(bounds) == 1:
        parts = [fn(r0, r1) for r0, r1 in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: fn(*b), bounds))
    return np.concatenate(parts)
