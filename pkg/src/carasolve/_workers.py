import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "CARASOLVE_THREADS"


def worker_count():
    raw = os.environ.get(ENV_THREADS, "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def ordered_map(fn, items):
    """Map ``fn`` over ``items`` on a thread pool; results keep input order."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
