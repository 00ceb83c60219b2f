"""Ordered worker pool.  Results come back in submission order, so every
reduction done by the caller is independent of the thread count."""
import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(threads=None):
    if threads is None:
        threads = int(os.environ.get("LATDISC_THREADS", "1") or 1)
    return max(1, int(threads))


def ordered_map(fn, items, threads=None):
    items = list(items)
    n = thread_count(threads)
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
