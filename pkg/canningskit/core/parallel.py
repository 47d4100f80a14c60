"""Chunked replicate execution with per-chunk counter-based random streams."""
from __future__ import annotations

import concurrent.futures as cf
import logging
import os
from typing import Any, Callable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_CHUNK = 256


def default_workers() -> int:
    env = os.environ.get("CANNINGS_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning("ignoring non-integer CANNINGS_WORKERS=%r", env)
    return os.cpu_count() or 1


def chunk_rng(seed: int, key: Sequence[int], index: int) -> np.random.Generator:
    """Generator for chunk `index` of the stream identified by (seed, key)."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key) + (index,))
    return np.random.Generator(np.random.Philox(ss))


def _run_one(fn: Callable, seed: int, key: tuple[int, ...], index: int, count: int, args: tuple) -> Any:
    return fn(chunk_rng(seed, key, index), count, *args)


def run_chunks(
    fn: Callable[..., np.ndarray],
    reps: int,
    seed: int,
    key: Sequence[int] = (),
    workers: int | None = 1,
    chunk_size: int = DEFAULT_CHUNK,
    args: tuple = (),
) -> np.ndarray:
    """Run fn(rng, count, *args) over fixed-size chunks and concatenate in chunk order.

    Chunk boundaries and streams depend only on (reps, seed, key, chunk_size),
    so the result is identical for any worker count. fn must be picklable when
    workers > 1.
    """
    counts = [chunk_size] * (reps // chunk_size)
    if reps % chunk_size:
        counts.append(reps % chunk_size)
    key = tuple(int(k) for k in key)
    workers = default_workers() if workers is None else max(1, int(workers))
    logger.debug("running %d replicates in %d chunks on %d workers (key=%s)", reps, len(counts), workers, key)

    if workers == 1 or len(counts) == 1:
        parts = [_run_one(fn, seed, key, i, c, args) for i, c in enumerate(counts)]
    else:
        with cf.ProcessPoolExecutor(max_workers=min(workers, len(counts))) as ex:
            futs = [ex.submit(_run_one, fn, seed, key, i, c, args) for i, c in enumerate(counts)]
            parts = [f.result() for f in futs]
    if not parts:
        return np.empty(0)
    return np.concatenate([np.atleast_1d(np.asarray(p)) for p in parts], axis=0)
