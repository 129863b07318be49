"""Monte Carlo error estimation, exponent fitting and scaling experiments.

Trial ``t`` of an experiment with master seed ``s`` reads the streams
``(s, t, label)``; tallies are integer sums, so results do not depend on how
trials are split across worker threads.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import _engine
from ._streams import alias_table
from .alphabet_model import BiUniformSpec, Distribution, ModelClassParams, bi_uniform, check_class_membership, uniform
from .exact_analysis import c_n_count, normalization_r, prob_C_n

log = logging.getLogger(__name__)

CLASSIFIERS = {"F": _engine.CLASSIFIER_F, "T": _engine.CLASSIFIER_T, "ORACLE": _engine.CLASSIFIER_ORACLE}
THREADS_ENV = "SPARSE_CLASSIFY_THREADS"


class DegenerateFitError(ValueError):
    """The regressor has no spread, so no slope can be fitted."""


class FitUndefinedError(ValueError):
    def __init__(self, censored):
        super().__init__(f"every grid point is censored (zero observed errors): {len(censored)} points")
        self.censored = censored


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def wilson_interval(successes: int, total: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total <= 0:
        raise ValueError("total must be positive")
    z = stats.norm.ppf(0.5 + confidence / 2)
    p = successes / total
    z2 = z * z
    denom = 1 + z2 / total
    centre = (p + z2 / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z2 / (4 * total * total)) / denom
    # the endpoint at an observed extreme is exactly 0 or 1, not a rounded neighbour
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == total else min(1.0, centre + half)
    return lo, hi


@dataclass
class ErrorEstimate:
    """Error tallies of one (m, N, n, classifier) point.

    Each trial contributes one H0 leg and one H1 leg, so the proportion
    ``p_hat`` and its Wilson interval are over ``2 * trials`` decisions.
    """

    trials: int
    errors_h0: int
    errors_h1: int
    ci_low: float
    ci_high: float
    confidence: float
    m: int = 0
    N: int = 0
    n: int = 0
    classifier: str = ""

    @property
    def p_hat(self) -> float:
        return (self.errors_h0 + self.errors_h1) / (2 * self.trials)

    @property
    def censored(self) -> bool:
        return self.errors_h0 + self.errors_h1 == 0

    @property
    def r(self) -> float:
        return normalization_r(self.N, self.n, self.m)

    @property
    def rule_of_three(self) -> float:
        return 3.0 / (2 * self.trials)


def _prepare(dist: Distribution):
    acc, al = alias_table(dist.probs)
    return acc, al


def _run(master, trials, N, n, code, x, y, z0, z1, llr, threads, pin=(0, 0)):
    threads = threads or default_threads()
    chunks = max(1, min(trials, threads * 4))
    bounds = np.linspace(0, trials, chunks + 1).astype(np.int64)
    empty = np.zeros((2, 0), dtype=np.int8)
    master = np.uint64(int(master) & ((1 << 64) - 1))

    def job(i):
        return _engine.run_trials(
            master, bounds[i], bounds[i + 1], N, n, code,
            x[0], x[1], y[0], y[1], pin[0], pin[1],
            z0[0], z0[1], z1[0], z1[1], llr, empty,
        )

    if threads == 1:
        parts = [job(i) for i in range(chunks)]
    else:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(job, range(chunks)))
    return sum(p[0] for p in parts), sum(p[1] for p in parts)


def _llr(pi: Distribution, mu: Distribution) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(mu.probs) - np.log(pi.probs)
    return np.nan_to_num(llr, nan=0.0, posinf=np.inf, neginf=-np.inf)


def _classifier_code(classifier_id: str) -> int:
    try:
        return CLASSIFIERS[str(classifier_id).upper()]
    except KeyError:
        raise ValueError(f"unknown classifier {classifier_id!r}; choose from {sorted(CLASSIFIERS)}") from None


def _check_sizes(code, N, n):
    if N < 1 or n < 1:
        raise ValueError(f"sample sizes must be positive, got N={N}, n={n}")
    if code == _engine.CLASSIFIER_T and (N < 2 or n < 2):
        raise ValueError(f"the T classifier needs N >= 2 and n >= 2, got N={N}, n={n}")


def estimate_error(
    pi: Distribution,
    mu: Distribution,
    N: int,
    n: int,
    classifier_id: str,
    trials: int,
    seed: int,
    confidence: float = 0.95,
    params: ModelClassParams | None = None,
    allow_outside_class: bool = False,
    threads: int | None = None,
) -> ErrorEstimate:
    """Monte Carlo estimate of the average error at the pair ``(pi, mu)``.

    When ``params`` is given the pair is checked against the model class;
    violations raise unless ``allow_outside_class`` is set, in which case
    they are logged.
    """
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    if pi.m != mu.m:
        raise ValueError("distributions must share the alphabet size")
    code = _classifier_code(classifier_id)
    _check_sizes(code, N, n)
    if params is not None:
        report = check_class_membership(pi, mu, params)
        if not report.ok:
            if not allow_outside_class:
                raise ValueError("pair outside the model class: " + "; ".join(report.violations))
            log.warning("pair outside the model class: %s", "; ".join(report.violations))
    x, y = _prepare(pi), _prepare(mu)
    llr = _llr(pi, mu) if code == _engine.CLASSIFIER_ORACLE else np.zeros(1)
    e0, e1 = _run(seed, trials, N, n, code, x, y, x, y, llr, threads)
    lo, hi = wilson_interval(e0 + e1, 2 * trials, confidence)
    return ErrorEstimate(trials, e0, e1, lo, hi, confidence, pi.m, N, n, str(classifier_id).upper())


def replay_decisions(pi: Distribution, mu: Distribution, N: int, n: int, classifier_id: str, trials: int, seed: int):
    """Per-trial decisions ``(d_h0, d_h1)`` of :func:`estimate_error`, for audits."""
    code = _classifier_code(classifier_id)
    _check_sizes(code, N, n)
    x, y = _prepare(pi), _prepare(mu)
    llr = _llr(pi, mu) if code == _engine.CLASSIFIER_ORACLE else np.zeros(1)
    rec = np.zeros((2, trials), dtype=np.int8)
    _engine.run_trials(
        np.uint64(seed), 0, trials, N, n, code, x[0], x[1], y[0], y[1], 0, 0,
        x[0], x[1], y[0], y[1], llr, rec,
    )
    return rec[0].copy(), rec[1].copy()


def point_seed(master_seed: int, index: int) -> int:
    """Seed of grid point ``index``: first word of ``SeedSequence([master, index])``."""
    return int(np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, np.uint64)[0])


def canonical_pair(m: int, epsilon: float) -> tuple[Distribution, Distribution]:
    """Uniform source and the bi-uniform source heavy on the first m/2 symbols."""
    return uniform(m), bi_uniform(BiUniformSpec(m, epsilon))


@dataclass
class SweepConfig:
    grid: list[tuple[int, int, int]]
    epsilon: float
    c_bar: float
    classifier_id: str = "T"
    trials_per_point: int = 10_000
    confidence_level: float = 0.95
    master_seed: int = 0
    require_sparse: bool = False
    require_consistency: bool = False

    def validate(self) -> None:
        if not self.grid:
            raise ValueError("grid is empty")
        _classifier_code(self.classifier_id)
        for m, N, n in self.grid:
            if m % 2:
                raise ValueError(f"grid point {(m, N, n)}: bi-uniform pair needs an even alphabet size m")
            if self.require_sparse and not max(N, n) < m:
                raise ValueError(f"grid point {(m, N, n)} violates the sparse regime max(N, n) < m")
            if self.require_consistency and not m < min(N * N, N * n):
                raise ValueError(f"grid point {(m, N, n)} violates m < min(N^2, N n)")


@dataclass
class FitPoint:
    m: int
    N: int
    n: int
    r: float
    p_hat: float
    minus_log_p: float
    ci_low: float
    ci_high: float
    censored: bool
    estimate: ErrorEstimate = field(repr=False)


@dataclass
class ExponentFit:
    points: list[FitPoint]
    slope: float
    intercept: float
    r_squared: float
    censored_points: list[FitPoint]


def run_grid(cfg: SweepConfig, threads: int | None = None) -> list[FitPoint]:
    cfg.validate()
    out = []
    for i, (m, N, n) in enumerate(cfg.grid):
        pi, mu = canonical_pair(m, cfg.epsilon)
        params = ModelClassParams(cfg.epsilon, cfg.c_bar, m)
        est = estimate_error(
            pi, mu, N, n, cfg.classifier_id, cfg.trials_per_point, point_seed(cfg.master_seed, i),
            cfg.confidence_level, params=params, threads=threads,
        )
        mlp = -math.log(est.p_hat) if not est.censored else math.inf
        out.append(FitPoint(m, N, n, est.r, est.p_hat, mlp, est.ci_low, est.ci_high, est.censored, est))
    return out


def fit_exponent(points: list[FitPoint]) -> ExponentFit:
    """Least squares of ``-log p_hat`` on ``r`` with intercept, censored points excluded."""
    if len({p.r for p in points}) < 2:
        raise DegenerateFitError("grid has no spread in r; slope is undefined")
    used = [p for p in points if not p.censored]
    censored = [p for p in points if p.censored]
    if not used:
        raise FitUndefinedError(censored)
    r = np.array([p.r for p in used])
    y = np.array([p.minus_log_p for p in used])
    if len(used) < 2 or np.ptp(r) == 0:
        raise DegenerateFitError(f"only {len(used)} uncensored point(s) with distinct r; slope is undefined")
    res = stats.linregress(r, y)
    return ExponentFit(points, float(res.slope), float(res.intercept), float(res.rvalue**2), censored)


def sweep_and_fit(cfg: SweepConfig, threads: int | None = None) -> ExponentFit:
    return fit_exponent(run_grid(cfg, threads))


@dataclass
class ConditionalErrorResult:
    """Outcome of the spiked-training-sample experiment for the F classifier.

    ``p_cond`` estimates P(decision 0 | C_n) when Z comes from the spiked
    (uniform) source; ``p_false_alarm`` is P(decision 1 | C_n) when Z comes
    from the bi-uniform source.  ``log_pe_bound`` is
    ``log(1/2) + log P(C_n) + log p_cond``.
    """

    m: int
    N: int
    n: int
    k: int
    trials: int
    errors: int
    p_cond: float
    ci_low: float
    ci_high: float
    false_alarms: int
    p_false_alarm: float
    log_prob_cn: float
    log_pe_bound: float
    asymptote: float

    @property
    def r(self) -> float:
        return normalization_r(self.N, self.n, self.m)


def conditional_false_alarm_experiment(
    m: int, N: int, n: int, epsilon: float, trials: int, seed: int,
    confidence: float = 0.95, threads: int | None = None,
) -> ConditionalErrorResult:
    """Error of the F classifier given that symbol 0 appears ``k = floor(4n/sqrt(m))`` times in Y.

    X follows the bi-uniform source, Y the uniform source with the pinned
    count.  A large spike in Y pushes ``||az/n - ay/N||`` up, so the F rule
    leans towards X whatever Z is: it errs when Z is drawn from Y's source.
    """
    if m % 2:
        raise ValueError(f"m must be even, got {m}")
    if trials <= 0:
        raise ValueError("trials must be positive")
    k = c_n_count(m, n)
    if k < 1:
        raise ValueError(f"floor(4n/sqrt(m)) = 0 for m={m}, n={n}; the conditioning event degenerates")
    if k > N:
        raise ValueError(f"pinned count k={k} exceeds N={N}")
    q, u = canonical_pair(m, epsilon)[::-1]
    rest = u.probs.copy()
    rest[0] = 0.0
    xq, yu = _prepare(q), alias_table(rest)
    zq, zu = _prepare(q), _prepare(u)
    e0, e1 = _run(seed, trials, N, n, _engine.CLASSIFIER_F, xq, yu, zq, zu, np.zeros(1), threads, pin=(0, k))
    lo, hi = wilson_interval(e1, trials, confidence)
    cn = prob_C_n(m, N, n)
    p_cond = e1 / trials
    bound = math.log(0.5) + cn.log_prob + (math.log(p_cond) if p_cond > 0 else -math.inf)
    return ConditionalErrorResult(
        m, N, n, k, trials, e1, p_cond, lo, hi, e0, e0 / trials, cn.log_prob, bound, cn.asymptote,
    )


@dataclass
class BoundaryRow:
    m: int
    N: int
    r: float
    estimate: ErrorEstimate

    @property
    def p_hat(self) -> float:
        return self.estimate.p_hat


def consistency_boundary_sweep(
    m_list, alpha: float, epsilon: float, trials: int, seed: int,
    confidence: float = 0.95, threads: int | None = None,
) -> list[BoundaryRow]:
    """T-classifier error at ``N = n = ceil(m**alpha)`` for each alphabet size."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    rows = []
    for i, m in enumerate(m_list):
        N = max(2, math.ceil(m**alpha - 1e-9))
        pi, mu = canonical_pair(m, epsilon)
        est = estimate_error(pi, mu, N, N, "T", trials, point_seed(seed, i), confidence, threads=threads)
        rows.append(BoundaryRow(m, N, normalization_r(N, N, m), est))
    return rows
