"""Exact and closed-form probabilities for the coincidence events.

All probabilities are natural logs; ``-inf`` encodes an impossible event.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit
from scipy.special import gammaln, logsumexp
from scipy.stats import binom

from .alphabet_model import Distribution
from .classifiers import JointCounts
from .sampling import Histogram

NEG_INF = -math.inf

# reported literal, not computed: the converse constant of the Z-side event
CONVERSE_J2 = 5.0


class EnumerationBudgetError(ValueError):
    def __init__(self, size: int, budget: int):
        super().__init__(f"brute-force enumeration needs {size:.3g} histogram triples, budget is {budget:.3g}")
        self.size = size
        self.budget = budget


def normalization_r(N: int, n: int, m: int) -> float:
    """``min(N**2, N*n) / m``."""
    if N <= 0 or n <= 0 or m <= 0:
        raise ValueError(f"N, n, m must be positive, got {(N, n, m)}")
    return min(N * N, N * n) / m


def prob_all_distinct_uniform(m: int, N: int) -> float:
    """Log of ``m (m-1) ... (m-N+1) / m**N``."""
    if N < 0 or m < 1:
        raise ValueError(f"need m >= 1 and N >= 0, got m={m}, N={N}")
    if N > m:
        return NEG_INF
    if N <= 1:
        return 0.0
    k = np.arange(N, dtype=np.float64)
    return float(np.sum(np.log1p(-k / m)))


@njit(cache=True)
def _log_esp_by_symbol(logw, N):
    # log e_0..e_N of exp(logw), one symbol at a time
    L = np.full(N + 1, -np.inf)
    L[0] = 0.0
    top = 0
    for j in range(logw.size):
        lw = logw[j]
        if lw == -np.inf:
            continue
        if top < N:
            top += 1
        for k in range(top, 0, -1):
            t = L[k - 1] + lw
            a = L[k]
            if t == -np.inf:
                continue
            if a == -np.inf:
                L[k] = t
            elif a > t:
                L[k] = a + np.log1p(np.exp(t - a))
            else:
                L[k] = t + np.log1p(np.exp(a - t))
    return L


def _log_esp_grouped(values: np.ndarray, counts: np.ndarray, N: int) -> float:
    """log e_N when the weights take few distinct values.

    The generating polynomial of a group of ``c`` equal weights ``w`` is
    ``sum_k C(c, k) w**k x**k``; groups are convolved in log space.
    """
    acc = np.array([0.0])
    for i, (w, c) in enumerate(zip(values, counts)):
        c = int(c)
        kmax = min(c, N)
        k = np.arange(kmax + 1)
        poly = gammaln(c + 1) - gammaln(k + 1) - gammaln(c - k + 1) + k * math.log(w)
        if i == len(values) - 1:
            lo = max(0, N - kmax)
            if lo > acc.size - 1:
                return NEG_INF
            j = np.arange(lo, min(acc.size - 1, N) + 1)
            return float(logsumexp(acc[j] + poly[N - j]))
        size = min(acc.size + kmax, N + 1)
        out = np.full(size, NEG_INF)
        for t in range(size):
            j = np.arange(max(0, t - kmax), min(acc.size - 1, t) + 1)
            out[t] = logsumexp(acc[j] + poly[t - j])
        acc = out
    return float(acc[N]) if N < acc.size else NEG_INF


def log_elementary_symmetric(weights, N: int, method: str = "auto") -> float:
    """log of the degree-``N`` elementary symmetric polynomial of ``weights``.

    ``method="symbol"`` runs the O(m N) recursion ``e_k += w_j e_{k-1}`` in
    log space; ``"grouped"`` convolves blocks of equal weights, which is
    O(G N**2) for G distinct values.  ``"auto"`` picks the cheaper one.
    """
    w = np.asarray(weights, dtype=np.float64)
    w = w[w > 0]
    if N < 0:
        raise ValueError("degree must be nonnegative")
    if N == 0:
        return 0.0
    if N > w.size:
        return NEG_INF
    if method == "auto":
        values, counts = np.unique(w, return_counts=True)
        method = "grouped" if (values.size - 1) * N <= w.size else "symbol"
    if method == "grouped":
        values, counts = np.unique(w, return_counts=True)
        return _log_esp_grouped(values, counts, N)
    if method == "symbol":
        return float(_log_esp_by_symbol(np.log(w), N)[N])
    raise ValueError(f"unknown method {method!r}")


def prob_all_distinct(dist: Distribution, N: int, method: str = "auto") -> float:
    """Log-probability that ``N`` i.i.d. draws from ``dist`` are pairwise distinct.

    Equals ``log(N! * e_N(p_1, ..., p_m))``.
    """
    if N < 0:
        raise ValueError("sample size must be nonnegative")
    if N <= 1:
        return 0.0
    le = log_elementary_symmetric(dist.probs, N, method)
    return NEG_INF if le == NEG_INF else float(gammaln(N + 1) + le)


def prob_event_A(dist_x: Distribution, dist_y: Distribution, N: int, method: str = "auto") -> float:
    """Log-probability that neither training sample repeats a symbol."""
    a = prob_all_distinct(dist_x, N, method)
    b = prob_all_distinct(dist_y, N, method)
    return a + b


def lemma_A_rate(epsilon: float, N: int, m: int) -> float:
    """Leading term ``-(1 + eps**2/2) N**2 / m`` of log P(A) for the uniform/bi-uniform pair."""
    return -(1.0 + 0.5 * epsilon * epsilon) * N * N / m


def prob_event_B_given_xy(ax: Histogram, ay: Histogram, z_dist: Distribution, n: int, method: str = "auto") -> float:
    """Log-probability that ``n`` test draws are distinct and avoid both training supports."""
    if not ax.m == ay.m == z_dist.m:
        raise ValueError("histograms and distribution must share the alphabet size")
    if n < 0:
        raise ValueError("test size must be nonnegative")
    if n == 0:
        return 0.0
    free = (ax.counts == 0) & (ay.counts == 0)
    le = log_elementary_symmetric(z_dist.probs[free], n, method)
    return NEG_INF if le == NEG_INF else float(gammaln(n + 1) + le)


def falling_factorial_log_prob(m: int, s: int, n: int) -> float:
    """``log[(m-s)(m-s-1)...(m-s-n+1) / m**n]``, the uniform case of the event-B probability."""
    if n > m - s:
        return NEG_INF
    k = np.arange(n, dtype=np.float64)
    return float(np.sum(np.log(m - s - k)) - n * math.log(m))


@dataclass(frozen=True)
class CnReport:
    k: int
    log_prob: float
    asymptote: float


def c_n_count(m: int, n: int) -> int:
    """``floor(4 n / sqrt(m))`` in exact integer arithmetic."""
    return math.isqrt((16 * n * n) // m)


def prob_C_n(m: int, N: int, n: int) -> CnReport:
    """Exact Binomial(N, 1/m) log-pmf at ``k = floor(4n/sqrt(m))``.

    This is the probability that a designated symbol appears exactly ``k``
    times in a uniform training sample.  ``asymptote`` is ``-4 (n/sqrt(m)) log m``.
    """
    if m < 1 or N < 0 or n < 0:
        raise ValueError(f"invalid sizes m={m}, N={N}, n={n}")
    k = c_n_count(m, n)
    asymptote = -4.0 * (n / math.sqrt(m)) * math.log(m)
    if k > N:
        return CnReport(k, NEG_INF, asymptote)
    return CnReport(k, float(binom.logpmf(k, N, 1.0 / m)), asymptote)


@dataclass
class BoundReport:
    """Explicit terms of the log-MGF upper bound at ``theta = min(N^2, nN) * gamma``."""

    main_term: float
    linear_term: float
    quadratic_term: float
    gamma: float
    theta: float
    scale: float
    linear_coef: float
    quadratic_coef: float
    dropped_remainder_note: str = field(
        default="remainders O(min(N^2,nN) max(N,n)/m^2) + O(1) not included; main-term bound only"
    )
    converse_j2: float = CONVERSE_J2


def _lambda_coefficients(pi: Distribution, mu: Distribution, nu: Distribution):
    if not pi.m == mu.m == nu.m:
        raise ValueError("distributions must share the alphabet size")
    p, q, v = pi.probs, mu.probs, nu.probs
    lin = float(np.sum(0.5 * (p - v) ** 2 - 0.5 * (q - v) ** 2))
    quad = float(np.sum(p * v + q * v + 0.5 * (p * p + q * q)))
    return lin, quad


def chernoff_lambda_bound(
    pi: Distribution, mu: Distribution, nu: Distribution, gamma: float | str, N: int, n: int
) -> BoundReport:
    """Main terms ``S (gamma * L + gamma**2 * Q)`` of the log-MGF bound for the T statistic.

    ``S = min(N**2, nN)``, ``L = sum_j [(pi_j - nu_j)**2 - (mu_j - nu_j)**2] / 2`` and
    ``Q = sum_j [pi_j nu_j + mu_j nu_j + (pi_j**2 + mu_j**2)/2]``.  Pass
    ``gamma="optimize"`` to evaluate at the vertex ``-L / (2Q)``.
    """
    lin, quad = _lambda_coefficients(pi, mu, nu)
    scale = float(min(N * N, n * N))
    if isinstance(gamma, str):
        if gamma != "optimize":
            raise ValueError(f"gamma must be a number or 'optimize', got {gamma!r}")
        gamma = optimal_gamma(lin, quad)
    gamma = float(gamma)
    lt = scale * gamma * lin
    qt = scale * gamma * gamma * quad
    return BoundReport(lt + qt, lt, qt, gamma, scale * gamma, scale, lin, quad)


def optimal_gamma(linear_coef: float, quadratic_coef: float) -> float:
    return -linear_coef / (2.0 * quadratic_coef) if quadratic_coef > 0 else 0.0


def achievability_exponent(epsilon: float, c_bar: float) -> float:
    """Guaranteed exponent ``eps**4 / (160 c_bar**2)`` of the coincidence classifier."""
    if epsilon <= 0 or c_bar <= 0:
        raise ValueError("epsilon and c_bar must be positive")
    return epsilon**4 / (160.0 * c_bar**2)


def compositions(total: int, parts: int):
    """All count vectors of length ``parts`` summing to ``total``, lexicographic."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def _log_multinomial(counts: np.ndarray, logp: np.ndarray, logfact: np.ndarray) -> float:
    nz = counts > 0
    if np.any(np.isneginf(logp[nz])):
        return NEG_INF
    return float(logfact[counts.sum()] - logfact[counts].sum() + np.dot(counts[nz], logp[nz]))


def enumeration_size(m: int, N: int, n: int) -> int:
    return math.comb(N + m - 1, m - 1) ** 2 * math.comb(n + m - 1, m - 1)


def exact_error_bruteforce(
    pi: Distribution,
    mu: Distribution,
    N: int,
    n: int,
    classifier: Callable[[JointCounts], int],
    budget: int = 10**8,
) -> float:
    """Exact ``P(phi=1 | Z~pi)/2 + P(phi=0 | Z~mu)/2`` by enumerating all histogram triples."""
    if pi.m != mu.m:
        raise ValueError("distributions must share the alphabet size")
    m = pi.m
    size = enumeration_size(m, N, n)
    if size > budget:
        raise EnumerationBudgetError(size, budget)
    logfact = gammaln(np.arange(max(N, n) + 1) + 1)
    with np.errstate(divide="ignore"):
        lp, lq = np.log(pi.probs), np.log(mu.probs)

    def weighted(total, logp):
        out = []
        for c in compositions(total, m):
            arr = np.array(c, dtype=np.int64)
            out.append((Histogram(arr), _log_multinomial(arr, logp, logfact)))
        return out

    xs = [(h, w) for h, w in weighted(N, lp) if w > NEG_INF]
    ys = [(h, w) for h, w in weighted(N, lq) if w > NEG_INF]
    zs = []
    for c in compositions(n, m):
        arr = np.array(c, dtype=np.int64)
        w0, w1 = _log_multinomial(arr, lp, logfact), _log_multinomial(arr, lq, logfact)
        if w0 > NEG_INF or w1 > NEG_INF:
            zs.append((Histogram(arr), math.exp(w0), math.exp(w1)))

    terms = []
    for hx, wx in xs:
        for hy, wy in ys:
            wxy = math.exp(wx + wy)
            for hz, pz0, pz1 in zs:
                d = classifier(JointCounts(hx, hy, hz))
                terms.append(wxy * (pz0 if d == 1 else pz1))
    return 0.5 * math.fsum(terms)
