"""Randomized property suites for escape rates and random SFT decompositions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .base import BaseSystem, SymbolSequence
from .cocycle import MatrixCocycle, leading_lyapunov, lyapunov_of_vector, lyapunov_spectrum, oseledets_vector
from .errors import DegenerateSplittingError, InsufficientSurvivalError
from .interval_maps import IntervalMapCocycle, MarkovPartition, PiecewiseAffineMap
from .metastability import (
    conditional_escape,
    escape_rate_exact,
    escape_rate_monte_carlo,
    lsq_slope,
    survivor_trace,
    verify_main_theorem,
)
from .sft import (
    RandomSFT,
    cylinder_count,
    decompose,
    entropy_bounds_check,
    enumerate_cylinders,
    uniform_aperiodicity,
    vector_bound_check,
)

__all__ = [
    "random_markov_map",
    "random_markov_cocycle",
    "EscapeInstance",
    "DensityPath",
    "density_path",
    "escape_instance",
    "SuiteResult",
    "main_theorem_suite",
    "SFTInstance",
    "sft_instance",
    "sft_suite",
]


@dataclass
class SuiteResult:
    """Accepted instances plus the number of configurations drawn."""

    instances: list
    attempts: int
    seed: int

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @property
    def rejected(self) -> int:
        return self.attempts - len(self.instances)


def random_markov_map(q: int, rng: np.random.Generator) -> PiecewiseAffineMap:
    """Markov map on ``q`` equal cells.

    Each cell is sent affinely, with random orientation, onto a random
    block of ``r >= 2`` consecutive cells (slope ``+-r``).
    """
    branches = []
    for i in range(q):
        r = int(rng.integers(2, q + 1))
        a = int(rng.integers(0, q - r + 1))
        lo, hi = Fraction(a, q), Fraction(a + r, q)
        x0 = Fraction(i, q)
        if rng.integers(2):
            branches.append((x0, x0 + Fraction(1, q), r, lo - r * x0))
        else:
            branches.append((x0, x0 + Fraction(1, q), -r, hi + r * x0))
    return PiecewiseAffineMap(branches, mod_one=False)


def random_markov_cocycle(rng: np.random.Generator, max_cells: int = 8, symbols: int = 2) -> IntervalMapCocycle:
    """Cocycle of independent random Markov maps on ``3..max_cells`` equal cells."""
    q = int(rng.integers(3, max_cells + 1))
    maps = {s: random_markov_map(q, rng) for s in range(1, symbols + 1)}
    return IntervalMapCocycle(maps, base=BaseSystem(symbols), partition=MarkovPartition.uniform(q))


def _random_window(rng, symbols, lo, hi):
    syms = rng.integers(1, symbols + 1, size=hi - lo + 1)
    return SymbolSequence(symbols, syms.tolist(), lo=lo)


@dataclass
class EscapeInstance:
    """One escape-rate-bound configuration and its measured quantities."""

    index: int
    cells: int
    lam: float
    escape: dict
    escape_same_window: dict
    conditional: dict
    monte_carlo: dict
    sigma: dict
    window: dict
    balance_residual: float
    theorem_passed: bool
    agreement_passed: bool
    tol: float
    margin: float
    escape_shifted: dict = field(default_factory=dict)

    def to_dict(self):
        return dict(self.__dict__)


def _exact_push(Cm, omega, f0, horizon):
    path = [f0]
    f = f0
    for n in range(horizon):
        f = f.dot(Cm.exact_matrix(omega, n))
        path.append(f)
    return path


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass
class DensityPath:
    """Exact push-forward of a cell-coefficient vector on a Markov partition."""

    coefficients: list
    norms: list
    lengths: list
    vector_path: object

    def log_norms(self) -> np.ndarray:
        return np.array([_log_fraction(n) if n else -np.inf for n in self.norms])

    def exponent(self, window=None) -> float:
        """Least-squares slope of ``log ||f_n||_1`` over `window` (default: last half)."""
        H = len(self.norms) - 1
        lo, hi = window or (H // 2, H)
        lam, _ = lsq_slope(np.arange(lo, hi + 1), self.log_norms()[lo:hi + 1])
        return lam

    def index_sets(self, sign=1):
        return [frozenset(i + 1 for i, x in enumerate(f) if sign * x > 0) for f in self.coefficients]

    def step_function(self, n, P: MarkovPartition):
        from .interval_maps import StepFunction

        return StepFunction(P.cuts, np.array(self.coefficients[n], dtype=object))


def density_path(C: IntervalMapCocycle, omega: SymbolSequence, horizon: int, N: int = 20, M: int = 20):
    """Second Oseledets direction of a Markov cocycle, pushed exactly.

    The ``l = 2`` vector of the transfer-matrix cocycle (with the cell
    lengths as the slow functional) is rounded to Fractions, projected
    exactly onto zero integral and pushed with exact matrices.  Returns
    ``None`` when the splitting is degenerate or the function vanishes.
    """
    P = C.partition
    lengths = P.lengths()
    Cm = C.matrix_cocycle()
    try:
        vp = oseledets_vector(Cm, omega, 2, N, M, 0, constraint=[float(l) for l in lengths])
    except DegenerateSplittingError:
        return None
    f0 = np.array([Fraction(float(x)) for x in vp.vectors[0]], dtype=object)
    f0 = f0 - sum(f0 * np.array(lengths, dtype=object))
    if not any(f0):
        return None
    path = _exact_push(Cm, omega, f0, horizon)
    wts = np.array(lengths, dtype=object)
    norms = [sum(abs(f) * wts) for f in path]
    return DensityPath(path, norms, lengths, vp)


def escape_instance(C: IntervalMapCocycle, omega: SymbolSequence, horizon: int = 100, N: int = 20, M: int = 20,
                    n_samples: int = 100_000, seed: int = 0, index: int = 0, shifted: bool = False):
    """Run the three escape estimators on the sign sets of an ``l = 2`` direction.

    Returns ``None`` for degenerate configurations (no spectral gap, or the
    pushed function vanishes), which callers resample.
    """
    P = C.partition
    q = len(P)
    Cm = C.matrix_cocycle()
    dp = density_path(C, omega, horizon, N, M)
    if dp is None or any(n == 0 for n in dp.norms):
        return None
    path, norms, lengths = dp.coefficients, dp.norms, dp.lengths
    wts = np.array(lengths, dtype=object)
    lam = dp.exponent()
    if not lam < 0:
        return None

    bal = 0.0
    for f, nrm in zip(path, norms):
        plus_mass = sum(x * w for x, w in zip(f, wts) if x > 0)
        bal = max(bal, abs(float(plus_mass - nrm / 2)))

    escape, esc_win, cond, mc, sig, win, esc_shift = {}, {}, {}, {}, {}, {}, {}
    agree = True
    I = {"+": dp.index_sets(1), "-": dp.index_sets(-1)}
    for side in ("+", "-"):
        sets = [P.union([i - 1 for i in s]) for s in I[side]]
        tr = survivor_trace(C, sets, omega, horizon)
        escape[side] = escape_rate_exact(tr)
        if shifted:
            tr1 = survivor_trace(C, sets[1:], omega.shift(1), horizon - 1)
            esc_shift[side] = escape_rate_exact(tr1)
        try:
            m = escape_rate_monte_carlo(C, sets, omega, horizon, n_samples, seed + 7919 * index + (side == "-"))
        except InsufficientSurvivalError:
            return None
        w = m.window
        ex_w = escape_rate_exact(tr, w)
        ce = conditional_escape(Cm, I[side], omega, horizon, weights=[float(l) for l in lengths], fit_window=w)
        mc[side], sig[side], win[side], cond[side] = m.rate, m.sigma, list(w), ce.rate
        tol_agree = max(0.05, 3 * m.sigma)
        vals = (ex_w, ce.rate, m.rate)
        if max(vals) - min(vals) > tol_agree:
            agree = False
        esc_win[side] = ex_w
    tol = 2.0 / horizon
    rep = verify_main_theorem(lam, escape["+"], escape["-"], tol)
    return EscapeInstance(index, q, lam, escape, esc_win, cond, mc, sig, win, bal, rep.passed, agree, tol,
                          min(rep.margin_plus, rep.margin_minus), esc_shift)


def main_theorem_suite(n_instances: int = 50, horizon: int = 100, seed: int = 2024, n_samples: int = 100_000,
                       N: int = 20, M: int = 20, max_cells: int = 8, shifted: bool = False) -> SuiteResult:
    """Randomized escape-rate-bound suite on two-symbol Markov cocycles."""
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < n_instances:
        attempts += 1
        if attempts > 20 * n_instances:
            raise RuntimeError("too many degenerate instances")
        C = random_markov_cocycle(rng, max_cells)
        omega = _random_window(rng, 2, -N - 1, horizon + M + 2)
        inst = escape_instance(C, omega, horizon, N, M, n_samples, seed, len(out), shifted)
        if inst is not None:
            out.append(inst)
    return SuiteResult(out, attempts, seed)


@dataclass
class SFTInstance:
    """One random-SFT configuration and its checks."""

    index: int
    k: int
    N: int
    lam1: float
    lam2: float
    blocks_exact: bool
    collapse_spread: float
    h_B: float
    h_B_prime: float
    bounds_passed: bool
    vector_passed: bool
    ratio_range: tuple
    horizon: int

    def to_dict(self):
        return dict(self.__dict__)


def sft_instance(S: RandomSFT, omega: SymbolSequence, horizon: int = 100, N: int = 20, M: int = 20,
                 n_vectors: int = 100, rng=None, index: int = 0, max_N: int = 6, blocks_upto: int = 10,
                 min_lam2: float = -5.0):
    """Check the SFT properties on one instance; ``None`` if it must be resampled."""
    Na = uniform_aperiodicity(S, max_N)
    if Na is None:
        return None
    rep = lyapunov_spectrum(S.cocycle, omega, horizon, 2)
    lam1, lam2 = rep.exponents
    if not np.isfinite(lam2) or lam2 < min_lam2:
        return None
    blocks = all(cylinder_count(S, omega, n) == len(enumerate_cylinders(S, omega, n))
                 for n in range(1, blocks_upto + 1))
    rng = np.random.default_rng(index) if rng is None else rng
    lead = leading_lyapunov(S.cocycle, omega, horizon).exponent
    vs = rng.random((n_vectors, S.k)) * (rng.random((n_vectors, S.k)) < 0.7)
    vs[np.arange(n_vectors), rng.integers(0, S.k, n_vectors)] += 1.0
    spread = max(abs(lyapunov_of_vector(S.cocycle, omega, v, horizon) - lead) for v in vs)
    try:
        B, Bp, vp = decompose(S, omega, 2, N, M, horizon, check_aperiodic=False)
    except DegenerateSplittingError:
        return None
    if not np.all(np.isfinite(vp.residuals)):
        return None
    eb = entropy_bounds_check(S, B, Bp, lam2, 3.0 / horizon)
    vb = vector_bound_check(S, vp, Na)
    return SFTInstance(index, S.k, Na, float(lam1), float(lam2), blocks, float(spread), eb.h_B, eb.h_B_prime,
                       eb.passed, vb.passed, (vb.min_ratio, vb.max_ratio), horizon)


def sft_suite(n_instances: int = 50, horizon: int = 100, seed: int = 7, k_range=(3, 6), density: float = 0.5,
              N: int = 20, M: int = 20, max_N: int = 6) -> SuiteResult:
    """Randomized suite of uniformly aperiodic two-symbol random SFTs."""
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < n_instances:
        attempts += 1
        if attempts > 200 * n_instances:
            raise RuntimeError("too few aperiodic instances")
        k = int(rng.integers(k_range[0], k_range[1] + 1))
        mats = {s: (rng.random((k, k)) < density).astype(np.int64) for s in (1, 2)}
        S = RandomSFT(MatrixCocycle(mats, base=BaseSystem(2)))
        if uniform_aperiodicity(S, max_N) is None:
            continue
        omega = _random_window(rng, 2, -N - 1, horizon + M + 2)
        inst = sft_instance(S, omega, horizon, N, M, rng=rng, index=len(out), max_N=max_N)
        if inst is not None:
            out.append(inst)
    return SuiteResult(out, attempts, seed)
