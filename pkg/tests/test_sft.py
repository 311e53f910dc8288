"""Random shifts of finite type: counts, entropy, aperiodicity and the B/B' split."""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdsmeta.base import BaseSystem, SymbolSequence
from rdsmeta.cocycle import MatrixCocycle, lyapunov_spectrum
from rdsmeta.errors import DegenerateSplittingError
from rdsmeta.sft import (
    RandomSFT,
    cylinder_count,
    decompose,
    entropy,
    entropy_bounds_check,
    enumerate_cylinders,
    matrix_path_entropy,
    to_dot,
    uniform_aperiodicity,
    vector_bound_check,
)

from conftest import A0, A1

PHI = (1 + math.sqrt(5)) / 2
CONST = SymbolSequence(2, [1], left=1, right=1)


def const_sft(A):
    return RandomSFT(MatrixCocycle({1: np.asarray(A)}))


def brute_count(mats, omega, n):
    """Words of length `n` counted by trying every symbol string."""
    k = mats[1].shape[0]
    return sum(all(mats[omega[i]][w[i], w[i + 1]] for i in range(n - 1))
               for w in itertools.product(range(k), repeat=n))


class TestCounts:
    def test_full_shift(self):
        S = const_sft(np.ones((2, 2), dtype=int))
        assert [cylinder_count(S, CONST, n) for n in range(1, 8)] == [2 ** n for n in range(1, 8)]
        assert entropy(S, CONST, 50).value == pytest.approx(math.log(2), abs=1e-12)

    def test_fibonacci(self):
        S = const_sft([[1, 1], [1, 0]])
        fib = [2, 3, 5, 8, 13, 21, 34]
        assert [cylinder_count(S, CONST, n) for n in range(1, 8)] == fib
        assert entropy(S, CONST, 400).value == pytest.approx(math.log(PHI), abs=5e-3)

    def test_brute_force(self, ex4):
        C, w = ex4
        S = RandomSFT(C)
        for n in range(1, 8):
            assert cylinder_count(S, w, n) == brute_count({1: A0, 2: A1}, w, n) == len(enumerate_cylinders(S, w, n))

    def test_enumerated_words_are_admissible(self, ex4):
        C, w = ex4
        words = enumerate_cylinders(RandomSFT(C), w, 6)
        assert len({tuple(x) for x in words}) == len(words)
        for x in words:
            assert all(C.matrix(w, i)[x[i] - 1, x[i + 1] - 1] for i in range(5))

    def test_entropy_cylinder_check(self, ex4):
        C, w = ex4
        e = entropy(RandomSFT(C), w, 12)
        assert e.value == pytest.approx(e.cylinder_check[12], abs=1e-12)

    def test_errors(self, ex4):
        C, w = ex4
        S = RandomSFT(C)
        with pytest.raises(ValueError):
            cylinder_count(S, w, 0)
        with pytest.raises(ValueError):
            enumerate_cylinders(S, w, 30, max_words=1000)
        with pytest.raises(ValueError):
            RandomSFT(MatrixCocycle({1: 2 * np.eye(2)}))


class TestAperiodicity:
    def test_examples(self):
        assert uniform_aperiodicity(const_sft(np.ones((2, 2), dtype=int))) == 1
        assert uniform_aperiodicity(const_sft([[1, 1], [1, 0]])) == 2
        assert uniform_aperiodicity(const_sft([[0, 1], [1, 0]])) is None

    def test_example4(self, ex4):
        assert uniform_aperiodicity(RandomSFT(ex4[0])) == 3

    def test_brute_force_oracle(self, ex4):
        mats = {1: A0, 2: A1}
        N = uniform_aperiodicity(RandomSFT(ex4[0]))
        for n in range(1, N + 1):
            allpos = all(np.linalg.multi_dot([np.eye(4)] + [mats[s] for s in word] + [np.eye(4)]).min() > 0
                         for word in itertools.product((1, 2), repeat=n))
            assert allpos == (n == N)

    def test_admissibility_restricts_words(self):
        # P^n is never positive, but E forbids repeating symbol 1
        P = np.array([[0, 1], [1, 0]])
        Q = np.array([[1, 1], [1, 1]])
        E = np.array([[0, 1], [1, 1]])
        free = RandomSFT(MatrixCocycle({1: P, 2: Q}))
        restricted = RandomSFT(MatrixCocycle({1: P, 2: Q}, base=BaseSystem(2, admissibility=E)))
        assert uniform_aperiodicity(free) is None
        assert uniform_aperiodicity(restricted) == 2


class TestDecomposition:
    def test_example4_rows(self, ex4):
        C, w = ex4
        B, Bp, _ = decompose(RandomSFT(C), w, 2, 20, 20, 40)
        assert [set(s) for s in B.index_sets[:4]] == [{1, 2}, {2, 4}, {1, 3}, {1, 2}]
        assert [set(s) for s in Bp.index_sets[:4]] == [{3, 4}, {1, 3}, {2, 4}, {3, 4}]

    def test_block_diagonal(self):
        A = np.zeros((4, 4), dtype=int)
        A[:2, :2] = 1
        A[2:, 2:] = [[1, 1], [1, 0]]
        S = const_sft(A)
        B, Bp, path = decompose(S, CONST, 2, 10, 10, 60, check_aperiodic=False)
        assert all(s == {3, 4} for s in B.index_sets)
        assert np.array_equal(B.matrices[0], A * np.outer([0, 0, 1, 1], [0, 0, 1, 1]))
        assert np.array_equal(Bp.matrices[0], A * np.outer([1, 1, 0, 0], [1, 1, 0, 0]))
        assert matrix_path_entropy(B.matrices[:59], 60) == pytest.approx(math.log(PHI), abs=0.02)
        assert matrix_path_entropy(Bp.matrices[:59], 60) == pytest.approx(math.log(2), abs=1e-12)
        assert path.exponent == pytest.approx(math.log(PHI), abs=1e-9)

    def test_requires_aperiodic(self):
        with pytest.raises(ValueError):
            decompose(const_sft([[0, 1], [1, 0]]), CONST)
        with pytest.raises(ValueError):
            decompose(const_sft(np.ones((2, 2), dtype=int)), CONST, ell=1)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_subshift_invariants(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(3, 6))
        mats = {s: (rng.random((k, k)) < 0.6).astype(int) for s in (1, 2)}
        S = RandomSFT(MatrixCocycle(mats))
        w = SymbolSequence(2, rng.integers(1, 3, size=80).tolist(), lo=-30)
        try:
            B, Bp, _ = decompose(S, w, 2, 5, 5, 30, check_aperiodic=False)
        except DegenerateSplittingError:
            return
        for n in range(30):
            A = S.matrix(w, n)
            assert (B[n] <= A).all() and (Bp[n] <= A).all()
            assert not (B[n] & Bp[n]).any()
            rows_b = B[n].any(axis=1)
            cols_b = B[n].any(axis=0)
            assert not Bp[n][rows_b].any() and not Bp[n][:, cols_b].any()
            for i, j in zip(*np.nonzero(B[n])):
                assert i + 1 in B.index_sets[n] and j + 1 in B.index_sets[n + 1]


class TestEntropyBounds:
    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=25, deadline=None)
    def test_sub_matrices_have_smaller_entropy(self, seed):
        rng = np.random.default_rng(seed)
        mats = [(rng.random((4, 4)) < 0.7).astype(int) for _ in range(20)]
        subs = [m * (rng.random((4, 4)) < 0.7) for m in mats]
        assert matrix_path_entropy(subs) <= matrix_path_entropy(mats) + 1e-12

    def test_report(self, ex4):
        C, w = ex4
        S = RandomSFT(C)
        B, Bp, _ = decompose(S, w, 2, 20, 20, 200)
        lam2 = lyapunov_spectrum(C, w, 40, 2).exponents[1]
        r = entropy_bounds_check(S, B, Bp, lam2, 0.01)
        assert r.passed and r.margin_B >= 0 and r.margin_B_prime >= 0
        assert not entropy_bounds_check(S, B, Bp, 5.0, 0.01).passed

    def test_path_entropy_edge_cases(self):
        assert matrix_path_entropy([np.zeros((2, 2))]) == -math.inf
        assert matrix_path_entropy([np.ones((3, 3))], 1) == pytest.approx(math.log(3))
        with pytest.raises(ValueError):
            matrix_path_entropy([np.ones((2, 2))], 5)


class TestVectorBound:
    def test_example4(self, ex4):
        C, w = ex4
        S = RandomSFT(C)
        _, _, path = decompose(S, w, 2, 20, 20, 40)
        r = vector_bound_check(S, path, 3)
        assert r.passed and 4 ** -3 <= r.min_ratio <= r.max_ratio <= 4 ** 3

    def test_flags(self):
        S = const_sft(np.ones((2, 2), dtype=int))
        r = vector_bound_check(S, np.array([[1.0, -1.0], [1.0, 0.0], [3.0, -1.0]]), 1)
        assert not r.passed and r.positivity_violations == [1]
        r = vector_bound_check(S, np.array([[5.0, -1.0]]), 1)
        assert not r.passed and r.max_ratio == 5.0
        assert vector_bound_check(S, np.array([[1.0, -1.0]]), 1).passed


def test_to_dot(ex4):
    C, w = ex4
    S = RandomSFT(C)
    B, Bp, _ = decompose(S, w, 2, 20, 20, 10)
    mats = [S.matrix(w, n) for n in range(10)]
    dot = to_dot(mats, B, Bp)
    assert dot.startswith("digraph decomposition {") and dot.endswith("}\n")
    assert dot.count("->") == sum(int(mats[n].sum()) for n in range(3))
    assert dot.count('color="red"') == sum(int(B[n].sum()) for n in range(3))
    assert dot.count('color="blue"') == sum(int(Bp[n].sum()) for n in range(3))
