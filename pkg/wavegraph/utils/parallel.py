"""Seeded random streams and replica-parallel execution.

Replica ``i`` of a run with master seed ``s`` always draws from
``SeedSequence(s, spawn_key=(i,))``, so a trajectory is reproducible from
``(s, i)`` alone and results do not depend on how replicas are spread over
worker processes.
"""

import os
from multiprocessing import get_context
from typing import Any, Callable, List, Optional

import numpy as np
import psutil

from .exceptions import ConfigurationError


def replica_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for replica ``index`` of master seed ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def default_workers() -> int:
    """Physical core count, falling back to the logical count."""
    return psutil.cpu_count(logical=False) or os.cpu_count() or 1


def _run_chunk(task: Callable[[int], Any], indices: List[int]) -> List[Any]:
    return [task(i) for i in indices]


class ReplicaPool:
    """Runs a per-replica task over replica indices, in order.

    Args:
        workers: Worker processes; ``None`` uses :func:`default_workers`,
            1 runs in the calling process
        verbose: Print a line per dispatched batch
        chunk_size: Replicas per worker task (default: spread evenly)
    """

    def __init__(self, workers: Optional[int] = None, verbose: bool = False, chunk_size: Optional[int] = None):
        if workers is not None and (int(workers) != workers or workers < 1):
            raise ConfigurationError(f"workers must be a positive integer, got {workers}")
        self.workers = int(workers) if workers is not None else default_workers()
        self.verbose = verbose
        self.chunk_size = chunk_size

    def map(self, task: Callable[[int], Any], replicas: int) -> List[Any]:
        """Results of ``task(i)`` for i = 0 .. replicas-1, in replica order.

        ``task`` must be picklable when more than one worker is used.
        """
        if replicas <= 0:
            return []
        workers = min(self.workers, replicas)
        if workers == 1:
            if self.verbose:
                print(f"Running {replicas} replicas in-process")
            return _run_chunk(task, list(range(replicas)))

        size = self.chunk_size or max(1, -(-replicas // (4 * workers)))
        chunks = [list(range(lo, min(lo + size, replicas))) for lo in range(0, replicas, size)]
        if self.verbose:
            print(f"Running {replicas} replicas on {workers} workers ({len(chunks)} batches)")
        with get_context("spawn").Pool(processes=workers) as pool:
            parts = pool.starmap(_run_chunk, [(task, chunk) for chunk in chunks])
        return [result for part in parts for result in part]
