"""
Order-preserving parallel map for parameter sweeps.
"""

import logging
import multiprocessing
from typing import Callable, List, Sequence, TypeVar


logger = logging.getLogger("dilutehom.parallel")

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """
    Apply ``func`` to every item, returning results in input order.

    With ``jobs > 1`` the work is spread over a process pool; ``func`` and the
    items must then be picklable.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    workers = min(jobs, len(items))
    logger.debug(f"Mapping {len(items)} items over {workers} processes")
    with multiprocessing.Pool(workers) as pool:
        return pool.map(func, items)
