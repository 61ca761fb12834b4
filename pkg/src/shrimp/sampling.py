"""Seedable random streams and subset/weight sampling primitives.

All randomness flows through :class:`numpy.random.Generator` backed by PCG64.
Independent streams are derived from ``(seed, stream_id)`` pairs through
:class:`numpy.random.SeedSequence`, so parallel cells never share state.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

log = logging.getLogger(__name__)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed``; extra ints select an independent child stream."""
    if seed < 0 or seed >= 2**64:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if stream:
        ss = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream))
    else:
        ss = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(ss))


def gaussian_matrix(rng: np.random.Generator, rows: int, cols: int, variance: float) -> np.ndarray:
    if not variance > 0:
        raise ParameterError(f"variance must be positive, got {variance}")
    return rng.normal(0.0, math.sqrt(variance), size=(rows, cols))


@dataclass(frozen=True)
class SubsetPlan:
    """Which coordinate subsets receive weights, and how many each.

    ``counts[j]`` is the number of weight rows supported on ``subsets[j]``.
    ``enumerated`` is False when the plan had to sample subsets because
    ``C(d, q)`` exceeds the feature budget.
    """

    d: int
    q: int
    subsets: tuple[tuple[int, ...], ...]
    counts: tuple[int, ...]
    enumerated: bool = True
    n_subsets_total: int = field(default=0)

    @property
    def N(self) -> int:
        return int(sum(self.counts))

    @property
    def n(self) -> int:
        """Weights per subset (the smallest count when the split is uneven)."""
        return min(self.counts)


def plan_subsets(d: int, q: int, N: int, rng: np.random.Generator | None = None) -> SubsetPlan:
    """Allocate ``N`` weight rows over size-``q`` subsets of ``range(d)``.

    When all ``C(d, q)`` subsets fit in the budget they are enumerated in
    lexicographic order and each gets ``N // C(d, q)`` rows, the remainder
    going one-per-subset in enumeration order. Otherwise ``N`` distinct
    subsets are drawn uniformly without replacement, one row each.
    """
    if not (1 <= q <= d):
        raise ParameterError(f"need 1 <= q <= d, got q={q}, d={d}")
    if N < 1:
        raise ParameterError(f"need N >= 1, got {N}")
    total = math.comb(d, q)
    if total <= N:
        subsets = tuple(itertools.combinations(range(d), q))
        base, rem = divmod(N, total)
        counts = tuple(base + (1 if j < rem else 0) for j in range(total))
        return SubsetPlan(d, q, subsets, counts, True, total)

    if rng is None:
        raise ParameterError("sampling mode (C(d,q) > N) needs an rng")
    log.warning(
        "C(%d,%d)=%d exceeds N=%d; sampling %d distinct subsets without replacement",
        d, q, total, N, N,
    )
    seen: set[tuple[int, ...]] = set()
    subsets = []
    while len(subsets) < N:
        s = tuple(sorted(int(i) for i in rng.choice(d, size=q, replace=False)))
        if s not in seen:
            seen.add(s)
            subsets.append(s)
    return SubsetPlan(d, q, tuple(subsets), (1,) * N, False, total)
