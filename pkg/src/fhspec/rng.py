"""Counter-based random streams and a small ordered parallel map.

Every random draw in the package comes from ``stream(seed, name, trial)``:
a Philox generator keyed by the run seed, a stable hash of the stage name
and the trial index.  Streams are therefore independent of evaluation
order and thread count, and adding a new named stage never shifts the
numbers produced by an existing one.
"""

from concurrent.futures import ThreadPoolExecutor
import os
import zlib

import numpy as np


def stream(seed, name, trial=0):
    key = (zlib.crc32(name.encode("utf-8")), int(trial))
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def max_threads():
    env = os.environ.get("FHSPEC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(os.cpu_count() or 1, 8))


def pmap(fn, items, threads=None):
    """``list(map(fn, items))`` evaluated on a thread pool, order preserved.

    LAPACK calls release the GIL, so threads give real speedup on the
    eigen-decompositions that dominate every sweep.
    """
    items = list(items)
    threads = max_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as ex:
        return list(ex.map(fn, items))
