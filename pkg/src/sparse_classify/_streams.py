"""Keyed counter-based random streams and alias tables, compiled with numba.

A stream is identified by ``(master_seed, trial_index, stream_label)``.  Its
starting state is ``mix(mix(mix(master) ^ trial) ^ label)`` where ``mix`` is
the SplitMix64 finalizer, and successive outputs are
``mix(state + k * 0x9E3779B97F4A7C15)`` for ``k = 1, 2, ...`` (SplitMix64).
This mapping is part of the package's reproducibility contract: changing it
changes every simulated number.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53

MASK64 = (1 << 64) - 1


@njit(cache=True, nogil=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def stream_state(master, trial, label):
    s = mix64(np.uint64(master))
    s = mix64(s ^ np.uint64(trial))
    return mix64(s ^ np.uint64(label))


@njit(cache=True, nogil=True)
def next_unit(state):
    """Advance ``state`` (a length-1 uint64 array) and return a double in [0, 1)."""
    state[0] = state[0] + _GOLDEN
    return np.float64(mix64(state[0]) >> _S11) * _TO_UNIT


@njit(cache=True, nogil=True)
def alias_draw(state, accept, alias):
    m = accept.size
    u = next_unit(state) * m
    i = np.int64(u)
    if i >= m:
        i = m - 1
    if u - i < accept[i]:
        return i
    return alias[i]


@njit(cache=True, nogil=True)
def fill_draws(state, accept, alias, out, start, stop):
    for i in range(start, stop):
        out[i] = alias_draw(state, accept, alias)


@njit(cache=True)
def _build_alias(p):
    # Vose's method on scaled probabilities
    m = p.size
    scaled = p * m
    accept = np.zeros(m)
    alias = np.arange(m).astype(np.int64)
    small = np.empty(m, dtype=np.int64)
    large = np.empty(m, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(m):
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        nl -= 1
        g = large[nl]
        accept[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small[ns] = g
            ns += 1
        else:
            large[nl] = g
            nl += 1
    while nl > 0:
        nl -= 1
        accept[large[nl]] = 1.0
    while ns > 0:
        ns -= 1
        accept[small[ns]] = 1.0  # leftover mass from rounding only
    # zero-probability symbols must never be returned directly
    for i in range(m):
        if p[i] == 0.0:
            accept[i] = 0.0
    return accept, alias


def alias_table(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(accept, alias)`` arrays for O(1) sampling from ``probs``."""
    p = np.ascontiguousarray(probs, dtype=np.float64)
    total = p.sum()
    if total <= 0:
        raise ValueError("cannot build an alias table for zero total mass")
    return _build_alias(p / total)


def new_state(master: int, trial: int, label: int) -> np.ndarray:
    return np.array([stream_state(np.uint64(master & MASK64), np.uint64(trial), np.uint64(label))], dtype=np.uint64)
