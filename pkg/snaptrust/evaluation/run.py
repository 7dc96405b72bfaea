"""Utility to run independent evaluation jobs, optionally in a process pool."""

import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

Job = TypeVar("Job")
Result = TypeVar("Result")


def default_workers() -> int:
    return os.cpu_count() or 1


def run(
    worker: Callable[[Job], Result],
    jobs: Iterable[Job],
    *,
    workers: int | None = 1,
    progress: bool = False,
    desc: str = "subtasks",
) -> list[Result]:
    """Apply ``worker`` to every job and return the results in job order.

    ``worker`` must be a module-level function when ``workers > 1`` so that it
    can be sent to the pool processes.
    """
    jobs = list(jobs)
    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1 or len(jobs) <= 1:
        return [worker(job) for job in tqdm(jobs, desc=desc, disable=not progress)]
    logger.info("pool workers=%d jobs=%d", workers, len(jobs))
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(tqdm(pool.map(worker, jobs), total=len(jobs), desc=desc, disable=not progress))
