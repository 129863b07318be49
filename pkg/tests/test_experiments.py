import math

import pytest

from sparse_classify.alphabet_model import Distribution, ModelClassParams, bi_uniform, uniform
from sparse_classify.classifiers import JointCounts, classify_f, classify_t, oracle_lrt
from sparse_classify.exact_analysis import exact_error_bruteforce
from sparse_classify.experiments import (
    DegenerateFitError,
    FitPoint,
    FitUndefinedError,
    SweepConfig,
    canonical_pair,
    conditional_false_alarm_experiment,
    consistency_boundary_sweep,
    estimate_error,
    fit_exponent,
    point_seed,
    replay_decisions,
    run_grid,
    sweep_and_fit,
    wilson_interval,
)
from sparse_classify.sampling import SeedSpec, StreamLabel, sample_conditioned_count, sample_histogram


def test_wilson_interval_values():
    lo, hi = wilson_interval(0, 10, 0.95)
    assert lo == 0.0 and hi == pytest.approx(1.959963984540054**2 / (10 + 1.959963984540054**2), rel=1e-12)
    lo, hi = wilson_interval(50, 100, 0.95)
    assert lo == pytest.approx(1 - hi, rel=1e-12) and lo < 0.5 < hi
    lo99, hi99 = wilson_interval(50, 100, 0.997)
    assert lo99 < lo and hi99 > hi


def test_equal_sources_give_one_half():
    u = uniform(50)
    for clf in ("T", "F"):
        est = estimate_error(u, u, 8, 8, clf, 10**5, seed=3)
        assert 0.494 <= est.p_hat <= 0.506
        assert est.ci_low <= 0.5 <= est.ci_high


def test_point_masses_never_err():
    pi, mu = Distribution([1.0, 0.0]), Distribution([0.0, 1.0])
    est = estimate_error(pi, mu, 2, 2, "T", 1000, seed=1)
    assert est.errors_h0 == est.errors_h1 == 0 and est.censored


@pytest.mark.parametrize("clf, rule", [("F", classify_f), ("T", classify_t)])
def test_agrees_with_bruteforce(clf, rule):
    u, q = uniform(4), bi_uniform(4, 0.8)
    exact = exact_error_bruteforce(u, q, 3, 3, rule)
    est = estimate_error(u, q, 3, 3, clf, 200_000, seed=17, confidence=0.997)
    assert est.ci_low <= exact <= est.ci_high


@pytest.mark.parametrize("clf", ["F", "T", "ORACLE"])
def test_kernel_replays_public_samplers(clf):
    m, N, n, trials, seed = 600, 12, 9, 300, 99
    u, q = canonical_pair(m, 0.5)
    d0, d1 = replay_decisions(u, q, N, n, clf, trials, seed)
    rule = {
        "F": classify_f,
        "T": classify_t,
        "ORACLE": lambda jc: oracle_lrt(jc.az, u, q),
    }[clf]
    for t in range(trials):
        ax = sample_histogram(u, N, SeedSpec(seed, t, StreamLabel.X), method="alias")
        ay = sample_histogram(q, N, SeedSpec(seed, t, StreamLabel.Y), method="alias")
        z0 = sample_histogram(u, n, SeedSpec(seed, t, StreamLabel.Z), method="alias")
        z1 = sample_histogram(q, n, SeedSpec(seed, t, StreamLabel.Z1), method="alias")
        assert d0[t] == rule(JointCounts(ax, ay, z0))
        assert d1[t] == rule(JointCounts(ax, ay, z1))


def test_kernel_pinned_y_matches_conditioned_sampler():
    # the pinned Y stream of the spiked experiment equals sample_conditioned_count
    m, N, k, seed = 256, 40, 5, 12
    u = uniform(m)
    hist = sample_conditioned_count(u, N, 0, k, SeedSpec(seed, 0, StreamLabel.Y), method="alias")
    assert hist.counts[0] == k and hist.total == N


def test_thread_count_does_not_change_tallies():
    u, q = canonical_pair(2000, 0.8)
    runs = [estimate_error(u, q, 90, 90, "T", 20_000, seed=5, threads=t) for t in (1, 2, 3)]
    assert len({(r.errors_h0, r.errors_h1) for r in runs}) == 1


def test_seed_changes_tallies():
    u, q = canonical_pair(2000, 0.8)
    a = estimate_error(u, q, 90, 90, "T", 5000, seed=5)
    b = estimate_error(u, q, 90, 90, "T", 5000, seed=6)
    assert (a.errors_h0, a.errors_h1) != (b.errors_h0, b.errors_h1)


def test_argument_validation():
    u, q = canonical_pair(10, 0.5)
    with pytest.raises(ValueError):
        estimate_error(u, q, 3, 3, "T", 0, seed=1)
    with pytest.raises(ValueError):
        estimate_error(u, q, 1, 3, "T", 10, seed=1)
    with pytest.raises(ValueError):
        estimate_error(u, q, 3, 3, "LDA", 10, seed=1)


def test_model_class_check_and_override(caplog):
    u = uniform(10)
    params = ModelClassParams(0.5, 1.5, 10)
    with pytest.raises(ValueError, match="l1 separation"):
        estimate_error(u, u, 3, 3, "T", 10, seed=1, params=params)
    est = estimate_error(u, u, 3, 3, "T", 10, seed=1, params=params, allow_outside_class=True)
    assert est.trials == 10
    assert "outside the model class" in caplog.text


def test_oracle_dominates_coincidence_rule():
    for m, N in [(1000, 45), (1000, 89), (4000, 126)]:
        u, q = canonical_pair(m, 0.8)
        t = estimate_error(u, q, N, N, "T", 20_000, seed=point_seed(8, m))
        o = estimate_error(u, q, N, N, "ORACLE", 20_000, seed=point_seed(8, m))
        width = (t.ci_high - t.ci_low) + (o.ci_high - o.ci_low)
        assert o.p_hat <= t.p_hat + 3 * width


def test_point_seeds_are_distinct_and_stable():
    assert point_seed(1, 0) == point_seed(1, 0)
    assert len({point_seed(1, i) for i in range(100)}) == 100


def _pt(r, p, censored=False):
    from sparse_classify.experiments import ErrorEstimate

    est = ErrorEstimate(1000, 0 if censored else 1, 0, 0.0, 1.0, 0.95, 1000, 10, 10, "T")
    return FitPoint(1000, 10, 10, r, p, -math.log(p) if not censored else math.inf, 0.0, 1.0, censored, est)


def test_fit_two_points_is_exact_line():
    fit = fit_exponent([_pt(1.0, math.exp(-1)), _pt(3.0, math.exp(-2))])
    assert fit.slope == pytest.approx(0.5) and fit.intercept == pytest.approx(0.5)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_excludes_and_reports_censored_points():
    pts = [_pt(1.0, 0.3), _pt(2.0, 0.1), _pt(3.0, 0.03), _pt(9.0, 0.0, censored=True)]
    fit = fit_exponent(pts)
    assert [p.r for p in fit.censored_points] == [9.0]
    assert len(fit.points) == 4 and fit.slope > 0


def test_fit_degenerate_and_undefined():
    with pytest.raises(DegenerateFitError):
        fit_exponent([_pt(2.0, 0.2), _pt(2.0, 0.25)])
    with pytest.raises(FitUndefinedError) as info:
        fit_exponent([_pt(1.0, 0.0, True), _pt(2.0, 0.0, True)])
    assert len(info.value.censored) == 2


def test_sweep_rejects_repeated_grid_point():
    cfg = SweepConfig([(1000, 40, 40)] * 3, 0.8, 1.8, "T", 200, master_seed=1)
    with pytest.raises(DegenerateFitError):
        sweep_and_fit(cfg)


def test_sweep_config_regime_checks():
    with pytest.raises(ValueError, match="sparse"):
        SweepConfig([(100, 200, 200)], 0.5, 1.5, require_sparse=True).validate()
    with pytest.raises(ValueError, match="min"):
        SweepConfig([(1000, 10, 10)], 0.5, 1.5, require_consistency=True).validate()
    with pytest.raises(ValueError, match="even"):
        SweepConfig([(1001, 10, 10)], 0.5, 1.5).validate()


def test_oracle_grid_is_monotone():
    m = 1000
    grid = [(m, math.ceil(math.sqrt(r * m)), math.ceil(math.sqrt(r * m))) for r in (2, 4, 6, 8)]
    pts = run_grid(SweepConfig(grid, 0.3, 1.3, "ORACLE", 20_000, master_seed=4))
    y = [p.minus_log_p for p in pts]
    assert all(b > a for a, b in zip(y, y[1:]))
    assert all(b.ci_high < a.ci_low for a, b in zip(pts, pts[1:]))


def test_sweep_is_reproducible_across_threads():
    grid = [(2000, 60, 60), (2000, 90, 90)]
    cfg = SweepConfig(grid, 0.8, 1.8, "T", 10_000, master_seed=42)
    a = [(p.estimate.errors_h0, p.estimate.errors_h1) for p in run_grid(cfg, threads=1)]
    b = [(p.estimate.errors_h0, p.estimate.errors_h1) for p in run_grid(cfg, threads=4)]
    assert a == b


class TestConditionalExperiment:
    def test_degenerate_event(self):
        with pytest.raises(ValueError, match="degenerates"):
            conditional_false_alarm_experiment(4096, 20, 15, 0.5, 10, seed=1)

    def test_odd_alphabet_and_large_pin(self):
        with pytest.raises(ValueError):
            conditional_false_alarm_experiment(4095, 512, 512, 0.5, 10, seed=1)
        with pytest.raises(ValueError, match="exceeds"):
            conditional_false_alarm_experiment(64, 3, 20, 0.5, 10, seed=1)

    def test_bound_identity(self):
        res = conditional_false_alarm_experiment(1024, 128, 128, 0.5, 2000, seed=2)
        assert res.k == 16
        assert res.log_pe_bound == pytest.approx(math.log(0.5) + res.log_prob_cn + math.log(res.p_cond), rel=1e-12)
        assert res.ci_low <= res.p_cond <= res.ci_high
        # the spike steers the F rule towards X, so Z from X is rarely misattributed
        assert res.p_cond > 0.5 and res.p_false_alarm < res.p_cond


def test_boundary_sweep_rows():
    rows = consistency_boundary_sweep([1000, 4000], 0.5, 0.8, 2000, seed=3)
    assert [r.m for r in rows] == [1000, 4000]
    assert [r.N for r in rows] == [32, 64]
    assert all(0.9 < r.r < 1.1 for r in rows)
    with pytest.raises(ValueError):
        consistency_boundary_sweep([1000], 1.2, 0.8, 10, seed=1)
