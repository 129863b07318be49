"""Test statistics, decisions and coincidence events on count vectors.

Decision 1 attributes the test sample to the second (Y) source, decision 0 to
the first (X) source.  Both statistics are evaluated through exact integer
numerators, so decisions at a tie are never at the mercy of rounding and
swapping the training histograms negates the value bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .alphabet_model import Distribution
from .sampling import Histogram


@dataclass(frozen=True)
class JointCounts:
    """Training histograms ``ax``, ``ay`` (size N each) and test histogram ``az`` (size n)."""

    ax: Histogram
    ay: Histogram
    az: Histogram

    def __post_init__(self):
        if not self.ax.m == self.ay.m == self.az.m:
            raise ValueError("all three histograms must share the alphabet size")
        if self.ax.total != self.ay.total:
            raise ValueError(f"training sizes differ: {self.ax.total} vs {self.ay.total}")

    @property
    def m(self) -> int:
        return self.ax.m

    @property
    def N(self) -> int:
        return self.ax.total

    @property
    def n(self) -> int:
        return self.az.total

    def swapped(self) -> "JointCounts":
        return JointCounts(self.ay, self.ax, self.az)

    def permuted(self, perm) -> "JointCounts":
        return JointCounts(self.ax.permuted(perm), self.ay.permuted(perm), self.az.permuted(perm))

    def _union_support(self):
        c = self.ax.counts | self.ay.counts | self.az.counts
        idx = np.flatnonzero(c)
        return self.ax.counts[idx], self.ay.counts[idx], self.az.counts[idx]


@dataclass(frozen=True)
class Profile:
    """``phi[i-1]`` is the number of symbols seen exactly ``i`` times."""

    phi: np.ndarray

    @property
    def total(self) -> int:
        return int(np.dot(np.arange(1, self.phi.size + 1), self.phi))

    def __getitem__(self, i: int) -> int:
        return int(self.phi[i - 1]) if 1 <= i <= self.phi.size else 0

    def __eq__(self, other):
        return isinstance(other, Profile) and np.array_equal(self.phi, other.phi)

    def __hash__(self):
        return hash(self.phi.tobytes())


def f_numerator(jc: JointCounts) -> int:
    """``F_n * N**2 * n`` as an exact integer."""
    N, n = jc.N, jc.n
    if N < 1 or n < 1:
        raise ValueError(f"F_n needs positive sample sizes, got N={N}, n={n}")
    ax, ay, az = jc._union_support()
    sq = int(np.dot(ax, ax)) - int(np.dot(ay, ay))
    cross = int(np.dot(az, ay)) - int(np.dot(az, ax))
    return n * sq + 2 * N * cross


def f_statistic(jc: JointCounts) -> float:
    """``||az/n - ax/N||^2 - ||az/n - ay/N||^2``."""
    num = f_numerator(jc)
    return num / (jc.N * jc.N * jc.n)


def _t_counts(ax, ay, az):
    c1 = int(np.count_nonzero((ax == 2) & (az == 0))) - int(np.count_nonzero((ay == 2) & (az == 0)))
    c2 = int(np.count_nonzero((ax == 0) & (az == 2))) - int(np.count_nonzero((ay == 0) & (az == 2)))
    c3 = int(np.count_nonzero((ay == 1) & (az == 1))) - int(np.count_nonzero((ax == 1) & (az == 1)))
    return c1, c2, c3


def t_numerator(jc: JointCounts) -> int:
    """``T_n * N**2 * n**2`` as an exact integer."""
    N, n = jc.N, jc.n
    if N < 2 or n < 2:
        raise ValueError(f"T_n needs N >= 2 and n >= 2, got N={N}, n={n}")
    c1, c2, c3 = _t_counts(*jc._union_support())
    return c1 * n * n + c2 * N * N + c3 * n * N


def t_statistic(jc: JointCounts) -> float:
    """Weighted coincidence statistic, evaluated over the union of supports.

    Pairs seen twice in one training sample but not in the test sample weigh
    ``1/N**2``, test-only pairs ``1/n**2``, and train/test singleton matches
    ``1/(nN)``; X-side terms enter with the sign favouring decision 1 when the
    test sample looks unlike X, Y-side terms with the opposite sign.
    """
    return t_numerator(jc) / (jc.N * jc.N * jc.n * jc.n)


def t_statistic_dense(jc: JointCounts) -> float:
    """Literal six-indicator sum over the whole alphabet, in exact rationals.

    O(m) reference for the sparse evaluation in :func:`t_statistic`.
    """
    N, n = jc.N, jc.n
    if N < 2 or n < 2:
        raise ValueError(f"T_n needs N >= 2 and n >= 2, got N={N}, n={n}")
    wN, wn, wnN = Fraction(1, N * N), Fraction(1, n * n), Fraction(1, n * N)
    total = Fraction(0)
    for x, y, z in zip(jc.ax.counts.tolist(), jc.ay.counts.tolist(), jc.az.counts.tolist()):
        total += (
            wN * (x == 2 and z == 0)
            + wn * (x == 0 and z == 2)
            - wnN * (x == 1 and z == 1)
            + wnN * (y == 1 and z == 1)
            - wn * (y == 0 and z == 2)
            - wN * (y == 2 and z == 0)
        )
    return float(total)


def classify_f(jc: JointCounts) -> int:
    return int(f_numerator(jc) >= 0)


def classify_t(jc: JointCounts) -> int:
    return int(t_numerator(jc) >= 0)


def oracle_lrt(az: Histogram, pi: Distribution, mu: Distribution) -> int:
    """Likelihood-ratio decision with the true sources known; ties go to 1."""
    if not az.m == pi.m == mu.m:
        raise ValueError("histogram and distributions must share the alphabet size")
    idx = az.support()
    a = az.counts[idx]
    p, q = pi.probs[idx], mu.probs[idx]
    impossible = (p == 0) & (q == 0)
    if np.any(impossible):
        raise ValueError(f"symbol {int(idx[np.argmax(impossible)])} observed but has zero probability under both sources")
    if np.any(q == 0):
        # likelihood under mu vanishes; a vanishing pi too makes it a tie
        return int(bool(np.any(p == 0)))
    if np.any(p == 0):
        return 1
    return int(float(np.dot(a, np.log(q) - np.log(p))) >= 0)


def profile(h: Histogram) -> Profile:
    phi = np.bincount(h.counts)[1:] if h.counts.size else np.zeros(0, dtype=np.int64)
    if phi.size and phi[-1] == 0:
        phi = np.trim_zeros(phi, "b")
    prof = Profile(phi.astype(np.int64))
    assert prof.total == h.total
    return prof


def event_A(ax: Histogram, ay: Histogram) -> bool:
    """Neither training sample repeats a symbol."""
    return bool(np.all(ax.counts <= 1) and np.all(ay.counts <= 1))


def event_B(jc: JointCounts) -> bool:
    """The test sample has no repeats and shares no symbol with either training sample."""
    az = jc.az.counts
    if np.any(az > 1):
        return False
    seen = az > 0
    return not bool(np.any(jc.ax.counts[seen]) or np.any(jc.ay.counts[seen]))
