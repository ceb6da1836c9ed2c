"""Ordered worker pool for parameter sweeps."""
from typing import Any, Callable, List, Optional, Sequence, TypeVar

import logfire
from joblib import Parallel, delayed

from dclab.core.config import get_settings

T = TypeVar("T")
R = TypeVar("R")


def run_ordered(
    fn: Callable[[T], R],
    items: Sequence[T],
    n_jobs: Optional[int] = None,
) -> List[R]:
    """Map a pure function over items and return results in input order.

    Args:
        fn: Picklable function of one item
        items: Work items
        n_jobs: Worker count, defaults to ``settings.WORKERS``

    Returns:
        ``[fn(item) for item in items]``
    """
    workers = n_jobs if n_jobs is not None else int(get_settings().WORKERS)
    workers = max(1, min(workers, len(items) or 1))
    logfire.info("sweep_started", items=len(items), workers=workers)
    if workers == 1:
        return [fn(item) for item in items]
    results: List[Any] = Parallel(n_jobs=workers)(delayed(fn)(item) for item in items)
    return results
