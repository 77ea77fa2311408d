"""
Ordered fan-out over a worker pool.

Calls are submitted through asyncio onto a thread or process executor and
gathered back in submission order, so results never depend on which worker
finished first.
"""

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Optional, Sequence

from heavytail.core.config import settings

logger = logging.getLogger(__name__)


async def _gather_ordered(
    func: Callable[..., Any],
    calls: Sequence[tuple],
    workers: int,
    processes: bool,
) -> List[Any]:
    loop = asyncio.get_running_loop()
    executor_cls = ProcessPoolExecutor if processes else ThreadPoolExecutor

    with executor_cls(max_workers=workers) as executor:
        tasks = [loop.run_in_executor(executor, func, *args) for args in calls]
        logger.debug(f"Dispatched {len(tasks)} calls of {getattr(func, '__name__', func)} to {workers} workers")
        return list(await asyncio.gather(*tasks))


def run_ordered(
    func: Callable[..., Any],
    calls: Iterable[tuple],
    workers: Optional[int] = None,
    processes: bool = False,
) -> List[Any]:
    """Evaluate func(*args) for every args tuple, results in input order"""
    calls = list(calls)
    workers = settings.WORKERS if workers is None else workers

    if workers <= 1 or len(calls) <= 1:
        return [func(*args) for args in calls]

    return asyncio.run(_gather_ordered(func, calls, workers, processes))
