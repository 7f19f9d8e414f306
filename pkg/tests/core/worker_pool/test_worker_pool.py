from unittest.mock import patch

import pytest

from src.core.worker_pool import INLINE, WorkerPool, default_workers


def _square(x: int) -> int:
    return x * x


def test_inline_pool_runs_in_order() -> None:
    assert INLINE.executor_kind == "inline"
    assert INLINE.map(_square, range(5)) == [0, 1, 4, 9, 16]


def test_process_pool_keeps_input_order() -> None:
    with WorkerPool(workers=2) as pool:
        assert pool.executor_kind == "process"
        assert pool.map(_square, range(10)) == [x * x for x in range(10)]


@pytest.mark.asyncio
async def test_gather_inside_running_loop() -> None:
    pool = WorkerPool(workers=2)
    try:
        assert await pool.gather(_square, [3, 1, 2]) == [9, 1, 4]
    finally:
        pool.shutdown()


def test_worker_count_must_be_positive() -> None:
    with pytest.raises(ValueError):
        WorkerPool(workers=0)


def test_default_workers_follows_cpu_affinity() -> None:
    with patch("src.core.worker_pool.psutil.Process") as process:
        process.return_value.cpu_affinity.return_value = [0, 1, 2]
        assert default_workers() == 3
        assert WorkerPool().workers == 3


def _nested_sum(n: int) -> int:
    return sum(INLINE.map(_square, range(n)))


@pytest.mark.parametrize("workers", [1, 2])
def test_jobs_may_map_inline(workers: int) -> None:
    """Test a job that fans out on the inline pool, as dense rollouts do"""
    with WorkerPool(workers=workers) as pool:
        assert pool.map(_nested_sum, [3]) == [5]
        assert pool.map(_nested_sum, [2, 3]) == [1, 5]
