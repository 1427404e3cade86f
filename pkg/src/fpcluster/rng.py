"""Seeded random streams.

Every randomized operation in this package draws from a Philox
(counter-based, splittable) bit generator, so a single 64-bit seed fully
determines all sampling decisions.  Conventions, pinned here so that runs
replay exactly:

* a seed ``s`` opens the base stream ``Philox(key=s & (2**64 - 1))``;
* multi-stage algorithms and restarts derive stream ``i`` from the same
  seed by counter jumps, ``Philox(key=s).jumped(i)``;
* categorical draws consume exactly one uniform double each, mapped
  through the inverse CDF of the cumulative probabilities;
* Gaussian matrices are filled in column-major order from the stream.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def make_rng(seed: int | np.random.Generator) -> np.random.Generator:
    """Philox-backed generator for ``seed``; passes Generators through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))


def stream_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream ``index`` derived from ``seed`` by counter jumps."""
    bg = np.random.Philox(key=int(seed) & _MASK64)
    if index:
        bg = bg.jumped(index)
    return np.random.Generator(bg)


def categorical(rng: np.random.Generator, cumprobs: np.ndarray, count: int) -> np.ndarray:
    """Draw ``count`` indices from the distribution with cumulative sums ``cumprobs``.

    Inverse-CDF sampling: draw ``t`` uses the ``t``-th uniform of the stream
    and picks the first index whose cumulative probability exceeds it, so an
    index with zero probability is never selected.
    """
    us = rng.random(count)
    idx = np.searchsorted(cumprobs, us, side="right")
    return np.minimum(idx, len(cumprobs) - 1)
