"""Seeded random streams.

Every sampler takes an explicit seed and derives independent child streams
from ``numpy.random.SeedSequence`` so that chunked or parallel evaluation
draws exactly the same numbers as a sequential run.
"""

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Build a generator for ``seed`` and an optional stream key.

    Parameters
    ----------
    seed : int
        Run seed.
    *stream : int
        Extra integers that select an independent child stream, e.g. a chunk
        index.

    Returns
    -------
    numpy.random.Generator
        PCG64 generator.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))
