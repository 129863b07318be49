"""Histogram-valued sampling.

Every sample is materialized as a count vector over the alphabet; the
classifiers never need symbol order.  Randomness is addressed by
:class:`SeedSpec` so that any trial of any experiment can be regenerated on
its own.

Two keyed generators are used:

* sparse draws (``size < m/16``, or ``method="alias"``) read the SplitMix64
  stream of :mod:`sparse_classify._streams` through an alias table, one
  symbol per observation.  The Monte Carlo kernels read the very same
  streams, so a trial can be replayed here exactly.
* everything else uses ``numpy.random.Generator(PCG64(SeedSequence([master,
  trial, label])))``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _streams
from .alphabet_model import Distribution

SPARSE_FRACTION = 16


class StreamLabel(enum.IntEnum):
    X = 0
    Y = 1
    Z = 2   # test sequence, H0 leg
    Z1 = 3  # test sequence, H1 leg
    AUX = 4


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    trial_index: int = 0
    stream_label: int = StreamLabel.AUX

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        if self.trial_index < 0:
            raise ValueError("trial_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.master_seed, self.trial_index, int(self.stream_label)])
        return np.random.Generator(np.random.PCG64(ss))

    def stream(self) -> np.ndarray:
        return _streams.new_state(self.master_seed, self.trial_index, int(self.stream_label))


@dataclass(frozen=True)
class Histogram:
    """Counts per symbol; ``total`` is the sample size."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64).ravel()
        if np.any(c < 0):
            raise ValueError("histogram counts must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def m(self) -> int:
        return self.counts.size

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    def permuted(self, perm: np.ndarray) -> "Histogram":
        """Relabel symbol ``j`` as ``perm[j]``."""
        out = np.empty_like(self.counts)
        out[np.asarray(perm)] = self.counts
        return Histogram(out)

    @classmethod
    def from_symbols(cls, symbols, m: int) -> "Histogram":
        return cls(np.bincount(np.asarray(symbols, dtype=np.int64), minlength=m))


def _alias_histogram(probs: np.ndarray, size: int, seed: SeedSpec) -> np.ndarray:
    accept, alias = _streams.alias_table(probs)
    draws = np.empty(size, dtype=np.int64)
    _streams.fill_draws(seed.stream(), accept, alias, draws, 0, size)
    return np.bincount(draws, minlength=probs.size)


def _draw_counts(probs: np.ndarray, size: int, seed: SeedSpec, method: str) -> np.ndarray:
    if size < 0:
        raise ValueError(f"sample size must be nonnegative, got {size}")
    if size == 0:
        return np.zeros(probs.size, dtype=np.int64)
    if method == "auto":
        method = "alias" if size * SPARSE_FRACTION < probs.size else "multinomial"
    if method == "alias":
        return _alias_histogram(probs, size, seed)
    if method == "multinomial":
        p = probs / probs.sum()
        return seed.generator().multinomial(size, p)
    raise ValueError(f"unknown sampling method {method!r}")


def sample_histogram(dist: Distribution, size: int, seed: SeedSpec, method: str = "auto") -> Histogram:
    """Histogram of ``size`` i.i.d. draws from ``dist``.

    ``method`` is ``"alias"`` (one keyed draw per observation, O(size)),
    ``"multinomial"`` (sequential conditional binomials, O(m)) or ``"auto"``,
    which picks alias draws when ``size < m/16``.
    """
    return Histogram(_draw_counts(dist.probs, int(size), seed, method))


def sample_conditioned_count(
    dist: Distribution,
    size: int,
    pinned_symbol: int,
    pinned_count: int,
    seed: SeedSpec,
    method: str = "auto",
) -> Histogram:
    """Multinomial histogram conditioned on ``counts[pinned_symbol] == pinned_count``.

    The pinned count is fixed and the remaining observations are drawn from
    ``dist`` restricted to the other symbols.
    """
    if not 0 <= pinned_count <= size:
        raise ValueError(f"pinned_count={pinned_count} must lie in [0, size={size}]")
    if not 0 <= pinned_symbol < dist.m:
        raise ValueError(f"pinned symbol {pinned_symbol} outside alphabet of size {dist.m}")
    if dist.probs[pinned_symbol] <= 0:
        raise ValueError("pinned symbol must have positive probability")
    rest = size - pinned_count
    restricted = dist.probs.copy()
    restricted[pinned_symbol] = 0.0
    if rest > 0 and restricted.sum() <= 0:
        raise ValueError("no probability mass outside the pinned symbol")
    counts = _draw_counts(restricted, rest, seed, method) if rest else np.zeros(dist.m, dtype=np.int64)
    counts[pinned_symbol] = pinned_count
    return Histogram(counts)


def poissonized_histogram(dist: Distribution, lam: float, seed: SeedSpec) -> Histogram:
    """Independent counts ``counts_j ~ Poisson(lam * p_j)``; the total is random."""
    if not lam > 0:
        raise ValueError(f"Poisson intensity must be positive, got {lam}")
    return Histogram(seed.generator().poisson(lam * dist.probs))


def inflate_alphabet(hist: Histogram, b: int, seed: SeedSpec) -> Histogram:
    """Split every symbol into ``b`` sub-symbols, reassigning observations uniformly.

    Symbol ``j`` maps to ``j*b, ..., j*b + b - 1``; each of its observations
    picks one uniformly at random, which on counts is a uniform multinomial
    split.
    """
    if b < 1:
        raise ValueError(f"inflation factor must be >= 1, got {b}")
    if b == 1:
        return hist
    split = seed.generator().multinomial(hist.counts, np.full(b, 1.0 / b))
    return Histogram(split.reshape(-1))
