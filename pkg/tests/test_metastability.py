"""Sign sets, survivor measures and the three escape-rate estimators."""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdsmeta.base import SymbolSequence
from rdsmeta.errors import DegenerateFunctionError, InsufficientSurvivalError
from rdsmeta.interval_maps import IntervalMapCocycle, MarkovPartition, StepFunction, doubling_map
from rdsmeta.intervals import IntervalUnion
from rdsmeta.metastability import (
    RandomSignSet,
    conditional_escape,
    escape_rate_exact,
    escape_rate_monte_carlo,
    lsq_slope,
    sign_sets,
    survivor_set,
    survivor_trace,
    verify_main_theorem,
)
from rdsmeta.suites import random_markov_cocycle

F = Fraction
HALF = F(1, 2)
LEFT = IntervalUnion([(0, HALF)])
CONST = SymbolSequence(2, [1], left=1, right=1)


def doubling(partition=None):
    return IntervalMapCocycle({1: doubling_map(0)}, partition=partition)


def grid_survivors(C, sets, omega, n, D):
    """Count midpoints ``(k + 1/2)/D`` whose first `n` iterates stay in the sets."""
    hits = 0
    for k in range(D):
        x = F(2 * k + 1, 2 * D)
        for i in range(n):
            if not sets[i].contains(x):
                break
            x = C.map(omega, i)(x)
        else:
            hits += 1
    return F(hits, D)


class TestSignSets:
    def test_vectors(self):
        s = sign_sets([np.array([1.0, -2.0, 0.0, 3.0]), np.array([-1.0, 1.0, 1.0, 1.0])])
        assert s.kind == "index" and s.plus[0] == {1, 4} and s.minus[0] == {2}
        assert s.horizon == 1 and s.side(-1) is s.minus

    def test_functions(self):
        f = StepFunction([0, HALF, 1], [-1.0, 2.0])
        s = sign_sets([f])
        assert s.plus[0] == IntervalUnion([(HALF, 1)]) and s.minus[0] == LEFT
        assert s.to_dict()["plus"] == [[["1/2", "1"]]]

    def test_positive_constant(self):
        s = sign_sets([StepFunction.constant(2.0)])
        assert s.plus[0] == IntervalUnion.full() and not s.minus[0]

    def test_degenerate(self):
        with pytest.raises(DegenerateFunctionError):
            sign_sets([np.array([1.0, -1.0]), np.zeros(2)])
        with pytest.raises(DegenerateFunctionError):
            sign_sets([StepFunction.constant(0.0)])
        with pytest.raises(ValueError):
            sign_sets([])

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            RandomSignSet([frozenset({1})], [frozenset({1, 2})], kind="index")


class TestSurvivors:
    def test_doubling_trace(self):
        tr = survivor_trace(doubling(), [LEFT] * 12, CONST, 12)
        assert tr.measures == [F(1, 2 ** n) for n in range(13)]
        assert escape_rate_exact(tr) == pytest.approx(math.log(2), abs=1e-12)
        assert tr.window == (6, 12) and tr.residual == pytest.approx(0.0, abs=1e-12)

    def test_cells_match_intervals(self):
        C = doubling(MarkovPartition.uniform(2))
        a = survivor_trace(C, [LEFT] * 10, CONST, 10, method="cells").measures
        b = survivor_trace(C, [LEFT] * 10, CONST, 10, method="intervals").measures
        assert a == b

    def test_zero_measure_gives_inf(self):
        sets = [LEFT, LEFT, IntervalUnion.empty(), LEFT]
        tr = survivor_trace(doubling(), sets, CONST, 4)
        assert tr.measures[3] == 0
        assert escape_rate_exact(tr) == math.inf

    def test_survivor_set_exact(self):
        assert survivor_set(doubling(), [LEFT] * 3, CONST, 3) == IntervalUnion([(0, F(1, 8))])
        assert survivor_set(doubling(), [LEFT], CONST, 0) == IntervalUnion.full()
        with pytest.raises(ValueError):
            survivor_set(doubling(), [LEFT], CONST, 2)

    @given(st.integers(0, 10 ** 6), st.integers(2, 4))
    @settings(max_examples=20, deadline=None)
    def test_random_markov_against_grid(self, seed, n):
        rng = np.random.default_rng(seed)
        C = random_markov_cocycle(rng, max_cells=4)
        q = len(C.partition)
        omega = SymbolSequence(2, rng.integers(1, 3, size=n).tolist())
        sets = []
        for _ in range(n):
            mask = rng.integers(0, 2, size=q).astype(bool)
            mask[rng.integers(q)] = True
            sets.append(C.partition.union(np.flatnonzero(mask)))
        tr = survivor_trace(C, sets, omega, n)
        slopes = 1
        for i in range(n - 1):
            slopes *= math.lcm(*(abs(l.slope.numerator) for l in C.map(omega, i).laps))
        D = q * slopes
        assert tr.measures[n] == grid_survivors(C, sets, omega, n, D)
        assert tr.measures == survivor_trace(C, sets, omega, n, method="intervals").measures

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_survivors_monotone(self, seed):
        rng = np.random.default_rng(seed)
        C = random_markov_cocycle(rng, max_cells=6)
        q = len(C.partition)
        H = 12
        omega = SymbolSequence(2, rng.integers(1, 3, size=H).tolist())
        sets = [C.partition.union(np.flatnonzero(rng.random(q) < 0.7)) for _ in range(H)]
        m = survivor_trace(C, sets, omega, H).measures
        assert all(b <= a for a, b in zip(m, m[1:]))

    def test_argument_checks(self):
        with pytest.raises(ValueError):
            survivor_trace(doubling(), [LEFT], CONST, 3)
        with pytest.raises(ValueError):
            survivor_trace(doubling(), [LEFT], CONST, 1, method="cells")
        with pytest.raises(ValueError):
            escape_rate_exact(survivor_trace(doubling(), [LEFT] * 3, CONST, 3), fit_window=(2, 5))


class TestConditional:
    def test_doubling(self):
        C = doubling(MarkovPartition.uniform(2))
        Cm = C.matrix_cocycle()
        r = conditional_escape(Cm, [frozenset({1})] * 20, CONST, 20, weights=[0.5, 0.5])
        assert np.allclose(r.log_mass[1:], -np.arange(1, 21) * math.log(2), atol=1e-12)
        assert r.rate == pytest.approx(math.log(2), abs=1e-12)

    def test_matches_exact_trace(self):
        rng = np.random.default_rng(3)
        C = random_markov_cocycle(rng, max_cells=6)
        q = len(C.partition)
        H = 15
        omega = SymbolSequence(2, rng.integers(1, 3, size=H).tolist())
        I = [frozenset(int(i) + 1 for i in np.flatnonzero(rng.random(q) < 0.6)) | {1} for _ in range(H)]
        sets = [C.partition.union([i - 1 for i in s]) for s in I]
        tr = survivor_trace(C, sets, omega, H)
        r = conditional_escape(C.matrix_cocycle(), I, omega, H, weights=[float(x) for x in C.partition.lengths()])
        assert np.allclose(r.log_mass, tr.log_measures(), atol=1e-10)

    def test_annihilation(self):
        Cm = doubling(MarkovPartition.uniform(2)).matrix_cocycle()
        r = conditional_escape(Cm, [frozenset({1}), frozenset()], CONST, 2)
        assert r.rate == math.inf and r.annihilated_at == 2

    def test_fit_window(self):
        Cm = doubling(MarkovPartition.uniform(2)).matrix_cocycle()
        r = conditional_escape(Cm, [frozenset({1})] * 10, CONST, 10, weights=[0.5, 0.5], fit_window=(5, 10))
        assert r.rate == pytest.approx(math.log(2), abs=1e-12) and r.window == (5, 10)


class TestMonteCarlo:
    def test_doubling(self):
        mc = escape_rate_monte_carlo(doubling(), [LEFT] * 20, CONST, 20, 200_000, seed=1)
        assert abs(mc.rate - math.log(2)) <= 3 * mc.sigma
        assert mc.counts[0] == 200_000 and mc.counts[1] == pytest.approx(100_000, rel=0.02)

    def test_deterministic(self):
        a = escape_rate_monte_carlo(doubling(), [LEFT] * 10, CONST, 10, 50_000, seed=9)
        b = escape_rate_monte_carlo(doubling(), [LEFT] * 10, CONST, 10, 50_000, seed=9)
        assert a.rate == b.rate and np.array_equal(a.counts, b.counts)
        c = escape_rate_monte_carlo(doubling(), [LEFT] * 10, CONST, 10, 50_000, seed=10)
        assert not np.array_equal(a.counts, c.counts)

    def test_sigma_shrinks(self):
        a = escape_rate_monte_carlo(doubling(), [LEFT] * 10, CONST, 10, 10_000, seed=2, fit_window=(2, 6))
        b = escape_rate_monte_carlo(doubling(), [LEFT] * 10, CONST, 10, 160_000, seed=2, fit_window=(2, 6))
        assert b.sigma == pytest.approx(a.sigma / 4, rel=0.3)

    def test_errors(self):
        with pytest.raises(ValueError):
            escape_rate_monte_carlo(doubling(), [LEFT] * 5, CONST, 5, 100, seed=1)
        with pytest.raises(ValueError):
            escape_rate_monte_carlo(doubling(), [LEFT] * 5, CONST, 5, 5000, seed=None)
        with pytest.raises(InsufficientSurvivalError):
            escape_rate_monte_carlo(doubling(), [IntervalUnion.empty()] * 5, CONST, 5, 5000, seed=1)


class TestMainTheorem:
    def test_pass(self):
        r = verify_main_theorem(-0.5, 0.4, 0.5)
        assert r.passed and r.margin_plus == pytest.approx(0.1) and r.margin_minus == pytest.approx(0.0)

    def test_fail_margin(self):
        r = verify_main_theorem(-0.5, 0.65, 0.3)
        assert not r.passed and r.margin_plus == pytest.approx(-0.15)

    def test_tolerance(self):
        assert verify_main_theorem(-0.5, 0.52, 0.5, tol=0.02).passed

    def test_nonnegative_exponent(self):
        with pytest.raises(ValueError):
            verify_main_theorem(0.0, 0.1, 0.1)


def test_lsq_slope():
    t = np.arange(10)
    s, r = lsq_slope(t, 3 * t + 1)
    assert s == pytest.approx(3.0) and r == pytest.approx(0.0, abs=1e-12)
