"""Deterministic, splittable Monte-Carlo plumbing.

Every randomized estimator in this package runs through :func:`mc_estimate`
or :func:`mc_frequency`.  Work is cut into fixed-size chunks; chunk j draws
from its own generator seeded by ``SeedSequence(seed, spawn_key=(j,))`` and
partial results are combined in chunk order.  Because no stream crosses a
chunk boundary and the reduction order is fixed, results are bit-identical
for a given (seed, N) no matter how many worker threads run the chunks.

Thread count is taken from the ``DEFLAB_THREADS`` environment variable
(default 1).  Long-axis reductions stay inside numpy's deterministic
pairwise summation; only short world-axis reductions go through BLAS.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["ScoreEstimate", "mc_estimate", "mc_frequency", "chunk_rng", "thread_count"]

#: Samples per chunk; fixed so the chunk -> seed map never depends on N.
CHUNK_SIZE = 1 << 16

DrawFn = Callable[[np.random.Generator, int], np.ndarray]
ValueFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScoreEstimate:
    """A Monte-Carlo mean with its standard error and provenance."""

    value: float
    std_error: float
    samples: int
    seed: int

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if not self.std_error >= 0.0:
            raise ValueError(f"std_error must be >= 0, got {self.std_error}")


def thread_count() -> int:
    """Worker threads for chunk evaluation, from DEFLAB_THREADS (default 1)."""
    raw = os.environ.get("DEFLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    """The dedicated generator for one chunk of one estimator run."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_index,)))


def _chunk_sizes(total: int) -> list[int]:
    full, rest = divmod(total, CHUNK_SIZE)
    return [CHUNK_SIZE] * full + ([rest] if rest else [])


def _map_chunks(work: Callable[[int, int], tuple], sizes: list[int]) -> list[tuple]:
    workers = thread_count()
    jobs = list(enumerate(sizes))
    if workers == 1 or len(jobs) == 1:
        return [work(j, m) for j, m in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda jm: work(*jm), jobs))


def mc_estimate(draw: DrawFn, values: ValueFn, samples: int, seed: int) -> ScoreEstimate:
    """Estimate E[values(X)] for X ~ draw, with sample standard error.

    ``draw(rng, m)`` must return an (m, dim) array, ``values`` an (m,) array.
    Per-chunk means and scatter are merged with the usual pairwise
    mean/M2 combination, sequentially in chunk order.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    sizes = _chunk_sizes(samples)

    def work(j: int, m: int) -> tuple[int, float, float]:
        chunk = np.asarray(values(draw(chunk_rng(seed, j), m)), dtype=float)
        if chunk.shape != (m,):
            raise ValueError(f"value function returned shape {chunk.shape}, expected ({m},)")
        mean = float(np.mean(chunk))
        m2 = float(np.sum((chunk - mean) ** 2))
        return m, mean, m2

    count, mean, m2 = 0, 0.0, 0.0
    for c_count, c_mean, c_m2 in _map_chunks(work, sizes):
        delta = c_mean - mean
        total = count + c_count
        mean += delta * (c_count / total)
        m2 += c_m2 + delta * delta * (count * c_count / total)
        count = total

    if count > 1 and m2 > 0.0:
        std_error = math.sqrt(m2 / (count - 1) / count)
    else:
        std_error = 0.0
    return ScoreEstimate(value=mean + 0.0, std_error=std_error, samples=count, seed=seed)


def mc_frequency(draw: DrawFn, hits: ValueFn, samples: int, seed: int) -> ScoreEstimate:
    """Estimate P[hits(X)] by exact counting, with binomial standard error.

    ``hits`` must return a boolean (m,) array.  Counts are integers, so the
    frequency is exact for the drawn sample and trivially reproducible.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    sizes = _chunk_sizes(samples)

    def work(j: int, m: int) -> tuple[int]:
        mask = np.asarray(hits(draw(chunk_rng(seed, j), m)))
        if mask.shape != (m,) or mask.dtype != np.bool_:
            raise ValueError(f"hit function returned {mask.dtype} shape {mask.shape}")
        return (int(np.count_nonzero(mask)),)

    total_hits = sum(h for (h,) in _map_chunks(work, sizes))
    freq = total_hits / samples
    std_error = math.sqrt(freq * (1.0 - freq) / samples)
    return ScoreEstimate(value=freq, std_error=std_error, samples=samples, seed=seed)


def gaussian_draw(dim: int, sigma: float) -> DrawFn:
    """Centered spherical Gaussian sampler of the given scale."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma}")

    def draw(rng: np.random.Generator, m: int) -> np.ndarray:
        return rng.standard_normal((m, dim)) * sigma

    return draw
