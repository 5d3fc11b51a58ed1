"""Reproducible random streams.

All samplers in this package take an explicit ``numpy.random.Generator``.
Streams are built on the counter-based Philox generator so that substream
``(seed, index)`` is independent of substream ``(seed, index')`` and samples
may be drawn concurrently without coordination: each index owns a disjoint
block of 2**192 values of the counter.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["substream", "SEED_ENV_VAR"]

SEED_ENV_VAR = "LOOPSOUP_SEED"


@lru_cache(maxsize=None)
def _philox_key(seed: int) -> tuple[int, int]:
    state = np.random.SeedSequence(seed).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def substream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for the ``index``-th independent stream of ``seed``."""
    if index < 0:
        raise ValueError("stream index must be nonnegative")
    bitgen = np.random.Philox(key=_philox_key(seed), counter=index << 192)
    return np.random.Generator(bitgen)
