"""Chunked thread-pool execution with results independent of the worker count."""

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "GEOSPHERE_THREADS"

_default_threads = None


def set_default_threads(n):
    global _default_threads
    _default_threads = None if n is None else max(1, int(n))


def resolve_threads(threads=None):
    if threads is not None:
        return max(1, int(threads))
    if _default_threads is not None:
        return _default_threads
    env = os.environ.get(ENV_VAR)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def for_chunks(func, n, chunk, threads=None):
    """Call ``func(lo, hi)`` over fixed-size index ranges covering ``range(n)``.

    Chunk boundaries depend only on ``n`` and ``chunk`` so that outputs written
    by ``func`` are bitwise identical whatever the thread count.
    """
    bounds = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
    workers = min(resolve_threads(threads), len(bounds))
    if workers <= 1:
        for lo, hi in bounds:
            func(lo, hi)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(func, lo, hi) for lo, hi in bounds]:
            fut.result()
