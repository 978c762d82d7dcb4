import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply `fn` to every item, results in input order.

    With more than one worker the calls run in a process pool, so `fn` and
    the items must be picklable (module-level functions, partials of them).
    """
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]

    chunksize = max(1, len(items) // (workers * 8))
    logger.debug(f"Dispatching {len(items)} tasks to {workers} workers (chunksize {chunksize})")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items, chunksize=chunksize))
