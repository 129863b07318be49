import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import f_literal, t_literal
from sparse_classify.alphabet_model import Distribution, uniform
from sparse_classify.classifiers import (
    JointCounts,
    classify_f,
    classify_t,
    event_A,
    event_B,
    f_statistic,
    oracle_lrt,
    profile,
    t_statistic,
    t_statistic_dense,
)
from sparse_classify.sampling import Histogram


def jc(ax, ay, az):
    return JointCounts(Histogram(ax), Histogram(ay), Histogram(az))


def random_joint(rng, m, N, n, concentration=1.0):
    """Counts drawn so that repeats and overlaps are common."""
    m_eff = max(1, int(rng.integers(1, m + 1) * concentration))
    draw = lambda k: np.bincount(rng.integers(0, m_eff, size=k), minlength=m)
    return jc(draw(N), draw(N), draw(n))


class TestFStatistic:
    def test_identical_training_gives_zero(self):
        assert f_statistic(jc([1, 2, 0], [1, 2, 0], [0, 1, 1])) == 0.0

    def test_worked_examples(self):
        assert f_statistic(jc([2, 0], [0, 2], [0, 2])) == 2.0
        v = jc([1, 1], [2, 0], [2, 0])
        assert f_statistic(v) == 0.5
        assert classify_f(v) == 1

    def test_zero_sizes_rejected(self):
        with pytest.raises(ValueError):
            f_statistic(jc([0, 0], [0, 0], [1, 0]))

    def test_tie_decides_one(self):
        v = jc([1, 0, 0], [0, 1, 0], [0, 0, 1])
        assert f_statistic(v) == 0.0 and classify_f(v) == 1

    def test_sign_decisions(self):
        assert classify_f(jc([2, 0], [0, 2], [2, 0])) == 0
        assert classify_f(jc([2, 0], [0, 2], [0, 2])) == 1

    def test_matches_literal_definition(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            m, N, n = int(rng.integers(1, 12)), int(rng.integers(1, 9)), int(rng.integers(1, 9))
            v = random_joint(rng, m, N, n)
            exact = f_literal(v.ax.counts.tolist(), v.ay.counts.tolist(), v.az.counts.tolist(), N, n)
            assert f_statistic(v) == float(exact)
            assert classify_f(v) == int(exact >= 0)


class TestTStatistic:
    def test_no_coincidences(self):
        assert t_statistic(jc([1, 1, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0], [0, 0, 0, 0, 1, 1])) == 0.0

    def test_worked_examples(self):
        assert t_statistic(jc([2, 0], [0, 2], [0, 2])) == 0.5
        assert t_statistic(jc([2, 0], [1, 1], [1, 1])) == 0.5
        assert classify_t(jc([2, 0], [0, 2], [0, 2])) == 1
        mirror = jc([2, 0], [0, 2], [2, 0])
        assert t_statistic(mirror) == -0.5 and classify_t(mirror) == 0

    def test_small_sizes_rejected(self):
        with pytest.raises(ValueError):
            t_statistic(jc([1, 0], [0, 1], [1, 1]))
        with pytest.raises(ValueError):
            t_statistic(jc([2, 0], [0, 2], [1, 0]))

    def test_tie_decides_one(self):
        v = jc([1, 1, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0], [0, 0, 0, 0, 1, 1])
        assert classify_t(v) == 1

    def test_matches_literal_definition(self):
        rng = np.random.default_rng(2)
        for _ in range(300):
            m, N, n = int(rng.integers(1, 10)), int(rng.integers(2, 8)), int(rng.integers(2, 8))
            v = random_joint(rng, m, N, n)
            exact = t_literal(v.ax.counts.tolist(), v.ay.counts.tolist(), v.az.counts.tolist(), N, n)
            assert t_statistic(v) == float(exact)


class TestOracle:
    def test_equal_sources_tie(self):
        u = uniform(3)
        assert oracle_lrt(Histogram([2, 1, 0]), u, u) == 1

    def test_single_symbol_ordering(self):
        pi, mu = Distribution([0.5, 0.5]), Distribution([0.2, 0.8])
        assert oracle_lrt(Histogram([0, 3]), pi, mu) == 1
        assert oracle_lrt(Histogram([3, 0]), pi, mu) == 0

    def test_log_ratio_example(self):
        pi, mu = Distribution([0.75, 0.25]), Distribution([0.25, 0.75])
        assert oracle_lrt(Histogram([0, 2]), pi, mu) == 1

    def test_zero_probabilities(self):
        pi, mu = Distribution([1.0, 0.0]), Distribution([0.0, 1.0])
        assert oracle_lrt(Histogram([2, 0]), pi, mu) == 0
        assert oracle_lrt(Histogram([0, 2]), pi, mu) == 1
        with pytest.raises(ValueError):
            oracle_lrt(Histogram([0, 0, 1]), Distribution([1.0, 0, 0]), Distribution([0, 1.0, 0]))


class TestProfiles:
    def test_examples(self):
        assert profile(Histogram([1, 1, 1])).phi.tolist() == [3]
        p = profile(Histogram([2, 1, 0]))
        assert p[1] == 1 and p[2] == 1 and p[3] == 0
        assert profile(Histogram([0, 0, 0])).phi.size == 0
        assert profile(Histogram([])).phi.size == 0

    @given(st.lists(st.integers(0, 20), max_size=40))
    @settings(max_examples=100, deadline=None)
    def test_totals(self, counts):
        h = Histogram(counts)
        p = profile(h)
        assert p.total == h.total
        assert p.phi.sum() <= max(h.m, 0)


class TestEvents:
    def test_event_A(self):
        assert event_A(Histogram([1, 1, 0]), Histogram([0, 1, 1]))
        assert not event_A(Histogram([2, 0, 0]), Histogram([0, 1, 1]))
        assert event_A(Histogram([0, 0]), Histogram([0, 0]))

    def test_event_B(self):
        assert event_B(jc([1, 1, 0, 0], [2, 0, 0, 0], [0, 0, 1, 1]))
        assert not event_B(jc([1, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0]))
        assert not event_B(jc([0, 1, 0, 0], [0, 1, 0, 0], [2, 0, 0, 0]))

    def test_event_B_kills_test_side_terms(self):
        # under B no indicator that needs a_z in {1, 2} can fire
        rng = np.random.default_rng(5)
        seen = 0
        for _ in range(2000):
            v = random_joint(rng, 40, 4, 3)
            if not event_B(v):
                continue
            seen += 1
            ax, ay, az = v.ax.counts, v.ay.counts, v.az.counts
            assert not np.any((az == 2)) and not np.any((az == 1) & ((ax == 1) | (ay == 1)))
        assert seen > 50


def _instances(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        m = int(rng.integers(2, 30))
        yield rng, random_joint(rng, m, int(rng.integers(2, 12)), int(rng.integers(2, 12)))


def test_permutation_invariance():
    for rng, v in _instances(1000, 10):
        perm = rng.permutation(v.m)
        w = v.permuted(perm)
        assert f_statistic(w) == f_statistic(v)
        assert t_statistic(w) == t_statistic(v)
        assert event_A(w.ax, w.ay) == event_A(v.ax, v.ay)
        assert event_B(w) == event_B(v)
        for a, b in ((w.ax, v.ax), (w.ay, v.ay), (w.az, v.az)):
            assert profile(a) == profile(b)


def test_training_swap_antisymmetry():
    for _, v in _instances(1000, 11):
        s = v.swapped()
        assert f_statistic(s) == -f_statistic(v)
        assert t_statistic(s) == -t_statistic(v)


def test_sparse_matches_dense():
    for _, v in _instances(1000, 12):
        assert t_statistic(v) == t_statistic_dense(v)


def test_joint_counts_validation():
    with pytest.raises(ValueError):
        jc([1, 1], [2, 0, 0], [1, 0])
    with pytest.raises(ValueError):
        jc([1, 1], [1, 0], [1, 0])
