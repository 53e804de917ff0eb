import multiprocessing
import os
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar, Union

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def chunks(lst, n: int = 10):
    """Yield successive n-sized chunks from lst."""
    for i in range(0, len(lst), n):
        yield lst[i : i + n]


def resolve_jobs(n_jobs: Optional[Union[float, int]] = 1) -> int:
    """Worker count from 1 / -1 (all CPUs) / -k (all but k-1) / a fraction of the CPUs."""
    if n_jobs is None:
        return 1
    if 0 < n_jobs < 1:
        return max(1, int(multiprocessing.cpu_count() * n_jobs))
    if n_jobs < 0:
        return max(1, multiprocessing.cpu_count() + 1 + int(n_jobs))
    return max(1, int(n_jobs))


def derive_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)[0])


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, *keys); independent of the order streams are created in."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *keys])))


def parallel_map(function: Callable[[T], R], items: Sequence[T], n_jobs: Optional[Union[float, int]] = 1) -> List[R]:
    """Order-preserving map over a process pool; serial when a single worker is requested."""
    workers = min(resolve_jobs(n_jobs), len(items)) if items else 1
    if workers <= 1:
        return [function(item) for item in items]
    with multiprocessing.get_context("spawn" if os.name == "nt" else "fork").Pool(workers) as pool:
        return pool.map(function, items)


def flatten(nested: Iterable[Iterable[T]]) -> List[T]:
    return [item for inner in nested for item in inner]
