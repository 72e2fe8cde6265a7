"""Index arithmetic over upper-triangle slots grouped by sequential distance.

Slots with distance in ``[d_lo, d_hi]`` are ranked by (distance, row): rank 0 is
``(0, d_lo)``, and distance ``d`` contributes ``n - d`` consecutive ranks.
"""
from __future__ import annotations

import numpy as np


def band_size(n: int, d_lo: int, d_hi: int) -> int:
    if d_hi < d_lo:
        return 0
    k = d_hi - d_lo + 1
    return k * n - (d_lo + d_hi) * k // 2


def unrank(ranks, n: int, d_lo: int, d_hi: int):
    """Map slot ranks to vertex pairs ``(i, j)`` with ``i < j``."""
    ranks = np.asarray(ranks, dtype=np.int64)
    d = np.arange(d_lo, d_hi + 1, dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(n - d)[:-1]))
    k = np.searchsorted(starts, ranks, side="right") - 1
    i = ranks - starts[k]
    return i, i + d[k]


def rank_distance(ranks, n: int, d_lo: int, d_hi: int):
    i, j = unrank(ranks, n, d_lo, d_hi)
    return j - i


def draw(rng: np.random.Generator, size: int, count: int, replace: bool) -> np.ndarray:
    """Uniform draw of ``count`` slot ranks out of ``size``."""
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    if replace:
        return rng.integers(0, size, size=count)
    return _partial_shuffle(rng, size, count)


def _partial_shuffle(rng: np.random.Generator, size: int, count: int) -> np.ndarray:
    # partial Fisher-Yates with a sparse swap table, O(count) memory
    swapped: dict[int, int] = {}
    picks = rng.integers(np.arange(count), size, dtype=np.int64) if count else []
    out = np.empty(count, dtype=np.int64)
    for t in range(count):
        k = int(picks[t])
        out[t] = swapped.get(k, k)
        swapped[k] = swapped.get(t, t)
    return out


def draw_batch(rng: np.random.Generator, size: int, count: int, replace: bool, n_samples: int) -> np.ndarray:
    """``n_samples`` independent draws as rows of an ``(n_samples, count)`` array."""
    if count == 0:
        return np.zeros((n_samples, 0), dtype=np.int64)
    if replace:
        return rng.integers(0, size, size=(n_samples, count))
    if size <= 4096:
        keys = rng.random((n_samples, size))
        return np.argpartition(keys, count - 1, axis=1)[:, :count] if count < size else np.tile(np.arange(size), (n_samples, 1))
    return np.stack([_partial_shuffle(rng, size, count) for _ in range(n_samples)])
