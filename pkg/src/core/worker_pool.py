import asyncio
import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

import psutil

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    """CPUs this process may run on."""
    try:
        return max(len(psutil.Process().cpu_affinity()), 1)
    except (AttributeError, psutil.Error):
        # cpu_affinity is not available on every platform
        return psutil.cpu_count() or 1


class WorkerPool:
    """Runs independent jobs across processes and returns results in input order.

    With a single worker every job runs inline in the calling process. Jobs
    must be picklable module-level callables when more than one worker is used.
    """

    def __init__(self, workers: int | None = None):
        self.workers: int = workers if workers is not None else default_workers()
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        self._executor: ProcessPoolExecutor | None = None

    @property
    def executor_kind(self) -> str:
        return "inline" if self.workers == 1 else "process"

    def _get_executor(self) -> ProcessPoolExecutor:
        if self._executor is None:
            logger.debug("starting %s pool with %d workers", self.executor_kind, self.workers)
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
        return self._executor

    async def gather(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        items = list(items)
        if self.workers == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        loop = asyncio.get_running_loop()
        executor = self._get_executor()
        futures = [loop.run_in_executor(executor, fn, item) for item in items]
        return list(await asyncio.gather(*futures))

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        items = list(items)
        # Inline jobs may call map themselves, so they never run inside an event loop.
        if self.workers == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        return asyncio.run(self.gather(fn, items))

    def shutdown(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(self, *exc: object) -> None:
        self.shutdown()


INLINE = WorkerPool(workers=1)
