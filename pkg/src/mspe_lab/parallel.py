"""
Ordered worker-pool evaluation

Results always come back in input order, so reductions over them do not
depend on how the work was scheduled.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from .config import get_worker_count

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    func: Callable[[T], R], items: Sequence[T], max_workers: Optional[int] = None
) -> List[R]:
    """
    Apply func to every item, possibly concurrently

    Args:
        func: Pure function of one item
        items: Inputs, evaluated independently
        max_workers: Worker cap; None reads MSPE_LAB_THREADS / machine parallelism

    Returns:
        List of results, index-aligned with items
    """
    workers = get_worker_count() if max_workers is None else max_workers
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug("Evaluating %d items on up to %d workers", len(items), workers)
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        # Executor.map yields in submission order
        return list(pool.map(func, items))
