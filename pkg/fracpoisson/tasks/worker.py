"""Chunked executor with worker-count-independent random substreams.

Replications are split into fixed-size chunks. Chunk ``j`` draws from
``SeedSequence([seed, j])``, so the values of a run depend only on
``(seed, n_rep)`` and not on how many processes execute it.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from fracpoisson.config import get_settings
from fracpoisson.errors import InputError

logger = structlog.get_logger(__name__)

ChunkFunction = Callable[..., Any]


@dataclass(frozen=True)
class Chunk:
    index: int
    start: int
    size: int


def plan_chunks(n_rep: int, chunk_size: Optional[int] = None) -> List[Chunk]:
    """Partition ``n_rep`` replications into consecutive chunks."""
    if n_rep <= 0:
        raise InputError(f"n_rep must be positive, got {n_rep}")
    size = chunk_size or get_settings().mc_chunk_size
    return [
        Chunk(index=j, start=start, size=min(size, n_rep - start))
        for j, start in enumerate(range(0, n_rep, size))
    ]


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for chunk ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def _run_chunk(job: Tuple[ChunkFunction, int, Chunk, Tuple[Any, ...]]) -> Any:
    fn, seed, chunk, args = job
    return fn(chunk_rng(seed, chunk.index), chunk.size, *args)


def run_chunks(
    fn: ChunkFunction,
    n_rep: int,
    seed: int,
    args: Sequence[Any] = (),
    workers: Optional[int] = None,
) -> List[Any]:
    """Run ``fn(rng, size, *args)`` over every chunk, results in chunk order.

    ``fn`` and ``args`` must be picklable when ``workers > 1``.

    Args:
        fn: Module-level chunk function.
        n_rep: Total number of replications.
        seed: Run seed.
        args: Extra positional arguments for ``fn``.
        workers: Process count; defaults to the ``workers`` setting.

    Returns:
        One result per chunk, ordered by chunk index.
    """
    workers = workers or get_settings().workers
    chunks = plan_chunks(n_rep)
    jobs = [(fn, seed, chunk, tuple(args)) for chunk in chunks]
    logger.debug(
        "run_chunks",
        task=getattr(fn, "__name__", repr(fn)),
        n_rep=n_rep,
        chunks=len(chunks),
        workers=workers,
    )
    if workers <= 1 or len(chunks) == 1:
        return [_run_chunk(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as executor:
        return list(executor.map(_run_chunk, jobs))


def mean_and_std_error(values: np.ndarray) -> Tuple[float, float]:
    """Sample mean and its standard error with compensated summation."""
    n = values.size
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    variance = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(variance / n)
