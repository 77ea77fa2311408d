"""Seeded counter-based random substreams for reproducible batched sampling."""

import logging
from typing import Callable, List, Optional

import numpy as np

from heavytail.core.config import settings
from heavytail.core.errors import ParameterOutOfRangeError
from heavytail.core.pool import run_ordered

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    if not 0 <= int(seed) <= MAX_SEED:
        raise ParameterOutOfRangeError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)


def check_count(count: int) -> int:
    if int(count) < 1:
        raise ParameterOutOfRangeError(f"count must be at least 1, got {count}")
    return int(count)


def substream(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, stream, batch index)"""
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(sequence))


def partition(count: int, batch_size: Optional[int] = None) -> List[int]:
    batch_size = batch_size or settings.BATCH_SIZE
    full, rest = divmod(check_count(count), batch_size)
    return [batch_size] * full + ([rest] if rest else [])


def generate(
    count: int,
    seed: int,
    draw: Callable[[np.random.Generator, int], np.ndarray],
    stream: int = 0,
    workers: Optional[int] = None,
    batch_size: Optional[int] = None,
) -> np.ndarray:
    """
    Draw `count` rows by splitting into fixed-size batches.

    Batch k always reads substream (seed, stream, k), so the concatenated
    result is identical for any worker count.
    """
    sizes = partition(count, batch_size)
    calls = [(substream(seed, k, stream), size) for k, size in enumerate(sizes)]
    logger.debug(f"Sampling {count} draws in {len(sizes)} batches (seed={seed}, stream={stream})")
    chunks = run_ordered(draw, calls, workers=workers)
    return np.concatenate(chunks, axis=0)
