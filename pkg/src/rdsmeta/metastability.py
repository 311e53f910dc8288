"""Random sign sets, survivor sets and escape rates.

Three independent estimators of the escape rate are provided: exact
survivor measures (interval geometry, or a backward cell recursion for
Markov configurations), the conditional transfer cocycle and Monte Carlo
sampling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

from .base import SymbolSequence
from .cocycle import MatrixCocycle
from .errors import DegenerateFunctionError, InsufficientSurvivalError
from .interval_maps import IntervalMapCocycle, MarkovPartition, StepFunction, preimage
from .intervals import IntervalUnion

__all__ = [
    "RandomSignSet",
    "SurvivorTrace",
    "ConditionalEscape",
    "MonteCarloEscape",
    "MainTheoremReport",
    "sign_sets",
    "survivor_set",
    "survivor_trace",
    "escape_rate_exact",
    "conditional_escape",
    "escape_rate_monte_carlo",
    "verify_main_theorem",
    "lsq_slope",
]

SetLike = Union[IntervalUnion, frozenset]


@dataclass
class RandomSignSet:
    """Per-step plus and minus sets.

    ``plus[n]`` and ``minus[n]`` are interval unions (interval cocycles) or
    frozensets of 1-based indices (matrix cocycles).
    """

    plus: List[SetLike]
    minus: List[SetLike]
    kind: str = "interval"

    def __post_init__(self):
        if len(self.plus) != len(self.minus):
            raise ValueError("plus and minus paths differ in length")
        for n, (p, m) in enumerate(zip(self.plus, self.minus)):
            if (p & m):
                raise ValueError(f"plus and minus sets overlap at step {n}")

    @property
    def horizon(self) -> int:
        return len(self.plus) - 1

    def side(self, sign: int):
        return self.plus if sign > 0 else self.minus

    def to_dict(self):
        if self.kind == "interval":
            conv = lambda s: s.to_list()
        else:
            conv = lambda s: sorted(s)
        return {"kind": self.kind, "plus": [conv(s) for s in self.plus],
                "minus": [conv(s) for s in self.minus]}


def sign_sets(f_path: Sequence) -> RandomSignSet:
    """Strict positivity and negativity sets along a path of functions or vectors.

    Raises
    ------
    DegenerateFunctionError
        If some element vanishes identically.
    """
    if not len(f_path):
        raise ValueError("path must be nonempty")
    plus, minus = [], []
    kind = "interval" if isinstance(f_path[0], StepFunction) else "index"
    for n, f in enumerate(f_path):
        if isinstance(f, StepFunction):
            if f.is_zero():
                raise DegenerateFunctionError(n)
            p, m = f.sign_sets()
        else:
            v = np.asarray(f)
            if not np.any(v != 0):
                raise DegenerateFunctionError(n)
            p = frozenset(int(i) + 1 for i in np.flatnonzero(v > 0))
            m = frozenset(int(i) + 1 for i in np.flatnonzero(v < 0))
        plus.append(p)
        minus.append(m)
    return RandomSignSet(plus, minus, kind)


def survivor_set(C: IntervalMapCocycle, sets: Sequence[IntervalUnion], omega: SymbolSequence, n: int) -> IntervalUnion:
    """Exact ``A^{(n)}(omega)``: points whose first ``n`` iterates stay in the sets.

    ``sets[i]`` is ``A(theta^i omega)``; ``n = 0`` gives the whole interval.
    """
    if n > len(sets):
        raise ValueError("n exceeds the available horizon")
    if n == 0:
        return IntervalUnion.full()
    R = sets[n - 1]
    for i in range(n - 2, -1, -1):
        R = preimage(C.map(omega, i), R) & sets[i]
    return R


def lsq_slope(t, y):
    """Ordinary least-squares slope and RMS residual."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.column_stack((t, np.ones_like(t)))
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2)))


def _default_window(horizon):
    return (horizon // 2, horizon)


@dataclass
class SurvivorTrace:
    """Survivor measures ``m(A^{(n)})`` for ``n = 0..horizon``.

    ``measures`` holds exact Fractions when available.  ``slope`` and
    ``window`` are filled by :func:`escape_rate_exact`.
    """

    measures: list
    window: tuple = None
    slope: Optional[float] = None
    residual: Optional[float] = None

    @property
    def horizon(self) -> int:
        return len(self.measures) - 1

    def log_measures(self) -> np.ndarray:
        out = np.empty(len(self.measures))
        for i, m in enumerate(self.measures):
            if m == 0:
                out[i] = -np.inf
            elif isinstance(m, Fraction):
                out[i] = math.log(m.numerator) - math.log(m.denominator)
            else:
                out[i] = math.log(m)
        return out

    def rows(self):
        lm = self.log_measures()
        return np.column_stack((np.arange(len(lm)), np.exp(lm), lm))

    def to_dict(self):
        return {"measures": [str(m) for m in self.measures], "window": list(self.window or ()),
                "slope": self.slope, "residual": self.residual}


def _cell_mask(P: MarkovPartition, S):
    """Boolean cell mask for an interval union that is a union of cells."""
    mask = np.array([S.contains(a) for a in P.cuts[:-1]])
    if P.union(np.flatnonzero(mask)) != S:
        return None
    return mask


def _survivors_cells(C, masks, omega, horizon):
    """Backward cell recursion in exact integer arithmetic, for all n."""
    P = C.partition
    lengths = P.lengths()
    dl = math.lcm(*(l.denominator for l in lengths))
    base = np.array([int(l * dl) for l in lengths], dtype=object)
    mats = []
    for i in range(horizon):
        M = C.transfer_matrix(omega[i])
        d = math.lcm(*(x.denominator for x in M.ravel()))
        mats.append((np.array([[int(x * d) for x in row] for row in M], dtype=object), d))
    out = [Fraction(1)]
    for n in range(1, horizon + 1):
        mu = np.where(masks[n - 1], base, 0).astype(object)
        den = dl
        for j in range(n - 2, -1, -1):
            K, d = mats[j]
            mu = np.where(masks[j], K.dot(mu), 0).astype(object)
            den *= d
        out.append(Fraction(int(mu.sum()), den))
    return out


def survivor_trace(C: IntervalMapCocycle, sets: Sequence[IntervalUnion], omega: SymbolSequence,
                   horizon: int, method: str = "auto") -> SurvivorTrace:
    """Exact survivor measures ``m(A^{(n)})`` for ``n = 0..horizon``.

    Parameters
    ----------
    method : {"auto", "cells", "intervals"}
        ``"cells"`` runs a backward recursion on the Markov partition (sets
        must be unions of cells); ``"intervals"`` intersects explicit
        preimages.  ``"auto"`` picks cells when possible.
    """
    if horizon > len(sets):
        raise ValueError("not enough sets for the horizon")
    masks = None
    if method in ("auto", "cells") and C.partition is not None:
        masks = [_cell_mask(C.partition, S) for S in sets[:horizon]]
        if any(m is None for m in masks):
            if method == "cells":
                raise ValueError("sets are not unions of partition cells")
            masks = None
    elif method == "cells":
        raise ValueError("cocycle has no Markov partition")
    if masks is not None:
        return SurvivorTrace(_survivors_cells(C, masks, omega, horizon))
    meas = [Fraction(1)]
    for n in range(1, horizon + 1):
        meas.append(survivor_set(C, sets, omega, n).measure())
    return SurvivorTrace(meas)


def escape_rate_exact(trace: SurvivorTrace, fit_window=None) -> float:
    """Least-squares slope of ``-log m(A^{(n)})`` over the fit window.

    The default window is the last half of the horizon.  A zero measure in
    the window means escape in finite time and yields ``+inf``.
    """
    lo, hi = fit_window or _default_window(trace.horizon)
    if not 0 <= lo < hi <= trace.horizon:
        raise ValueError("bad fit window")
    lm = trace.log_measures()[lo:hi + 1]
    trace.window = (lo, hi)
    if not np.all(np.isfinite(lm)):
        trace.slope, trace.residual = math.inf, None
        return math.inf
    s, r = lsq_slope(np.arange(lo, hi + 1), -lm)
    trace.slope, trace.residual = s, r
    return s


@dataclass
class ConditionalEscape:
    rate: float
    log_mass: np.ndarray
    annihilated_at: Optional[int] = None
    window: Optional[tuple] = None


def conditional_escape(Cmat: MatrixCocycle, I_path: Sequence[frozenset], omega: SymbolSequence, horizon: int,
                       weights=None, fit_window=None) -> ConditionalEscape:
    """Escape rate from the restricted (conditional) transfer cocycle.

    The indicator of ``I(omega)`` is pushed forward, with mass outside
    ``I(theta^n omega)`` deleted at every step.  ``log_mass[n]`` is the log
    of the remaining weighted mass after ``n - 1`` pushes, which equals the
    survivor measure of ``A^{(n)}``.

    Parameters
    ----------
    I_path : sequence of frozenset
        1-based index sets, at least `horizon` of them.
    weights : array_like, optional
        Measure of each state (cell lengths); uniform by default.
    fit_window : (int, int), optional
        If given, the rate is a least-squares slope over this window,
        otherwise ``-log_mass[horizon] / horizon``.
    """
    k = Cmat.dimension(omega)
    if len(I_path) < horizon:
        raise ValueError("not enough index sets for the horizon")
    w = np.full(k, 1.0 / k) if weights is None else np.asarray(weights, dtype=float)
    chi = [np.isin(np.arange(1, k + 1), sorted(I)).astype(float) for I in I_path[:horizon]]
    log_mass = np.full(horizon + 1, -np.inf)
    log_mass[0] = math.log(w.sum())
    v = chi[0].copy()
    acc = 0.0
    dead = None
    for n in range(1, horizon + 1):
        if n > 1:
            v = (v @ Cmat.matrix(omega, n - 2)) * chi[n - 1]
        m = float(v @ w)
        if m <= 0:
            dead = n
            break
        log_mass[n] = acc + math.log(m)
        # renormalize to keep the vector in range
        c = np.abs(v).sum()
        acc += math.log(c)
        v /= c
    if dead is not None:
        return ConditionalEscape(math.inf, log_mass, dead)
    if fit_window is None:
        return ConditionalEscape(-(log_mass[horizon] - log_mass[0]) / horizon, log_mass)
    lo, hi = fit_window
    s, _ = lsq_slope(np.arange(lo, hi + 1), -log_mass[lo:hi + 1])
    return ConditionalEscape(s, log_mass, None, (lo, hi))


@dataclass
class MonteCarloEscape:
    rate: float
    sigma: float
    counts: np.ndarray
    n_samples: int
    window: tuple
    seed: int

    def to_dict(self):
        return {"rate": self.rate, "sigma": self.sigma, "counts": self.counts.tolist(),
                "n_samples": self.n_samples, "window": list(self.window), "seed": self.seed}


def _mc_block(C, sets, omega, horizon, ss, n, min_survivors):
    rng = np.random.Generator(np.random.Philox(ss))
    x = rng.random(n)
    counts = np.zeros(horizon + 1, dtype=np.int64)
    counts[0] = n
    for i in range(horizon):
        x = x[sets[i].contains_array(x)]
        counts[i + 1] = x.size
        if x.size == 0:
            break
        x = C.map(omega, i).apply_array(x)
    return counts


def escape_rate_monte_carlo(C: IntervalMapCocycle, sets: Sequence[IntervalUnion], omega: SymbolSequence,
                            horizon: int, n_samples: int, seed: int, fit_window=None,
                            min_survivors: int = 200, block_size: int = 1 << 16) -> MonteCarloEscape:
    """Monte Carlo escape rate with a binomial error bar.

    Uniform initial points are iterated in float64 and checked against the
    exact sets.  Blocks use independent Philox substreams spawned from
    `seed`, and their tallies are summed, so the result does not depend on
    block order.  The default fit window is ``[K // 2, K]`` where ``K`` is
    the last step with at least `min_survivors` survivors.

    Returns
    -------
    MonteCarloEscape
        ``rate`` is minus the least-squares slope of the log survivor
        fraction; ``sigma`` its standard error under the nested binomial
        model ``Cov(y_m, y_n) = 1/S_{min(m,n)} - 1/N``.

    Raises
    ------
    InsufficientSurvivalError
        If fewer than 3 steps keep enough survivors.
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be >= 1000")
    if seed is None:
        raise ValueError("seed is required")
    if horizon > len(sets):
        raise ValueError("not enough sets for the horizon")
    n_blocks = -(-n_samples // block_size)
    sizes = [block_size] * (n_blocks - 1) + [n_samples - block_size * (n_blocks - 1)]
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    counts = np.zeros(horizon + 1, dtype=np.int64)
    for ss, n in zip(children, sizes):
        counts += _mc_block(C, sets, omega, horizon, ss, n, min_survivors)
    if fit_window is None:
        ok = np.flatnonzero(counts >= min_survivors)
        K = int(ok[-1]) if ok.size else 0
        if K < 3:
            raise InsufficientSurvivalError(f"only {K} steps keep {min_survivors} survivors")
        fit_window = (K // 2, K)
    lo, hi = fit_window
    S = counts[lo:hi + 1].astype(float)
    if (S == 0).any():
        raise InsufficientSurvivalError("a fit-window step has no survivors")
    t = np.arange(lo, hi + 1, dtype=float)
    y = np.log(S / n_samples)
    slope, _ = lsq_slope(t, y)
    w = (t - t.mean()) / ((t - t.mean()) ** 2).sum()
    cov = 1.0 / np.maximum.outer(S, S) - 1.0 / n_samples
    sigma = float(np.sqrt(max(w @ cov @ w, 0.0)))
    return MonteCarloEscape(-slope, sigma, counts, n_samples, (lo, hi), int(seed))


@dataclass
class MainTheoremReport:
    passed: bool
    exponent: float
    escape_plus: float
    escape_minus: float
    tol: float
    margin_plus: float = field(init=False)
    margin_minus: float = field(init=False)

    def __post_init__(self):
        self.margin_plus = -self.exponent + self.tol - self.escape_plus
        self.margin_minus = -self.exponent + self.tol - self.escape_minus


def verify_main_theorem(lam: float, escape_plus: float, escape_minus: float, tol: float = 0.0) -> MainTheoremReport:
    """Check ``E(A_+), E(A_-) <= -lam + tol``; margins are positive on success.

    A failing report's margin is the (negative) amount of violation.
    """
    if not lam < 0:
        raise ValueError("the exponent must be negative")
    ok = escape_plus <= -lam + tol and escape_minus <= -lam + tol
    return MainTheoremReport(bool(ok), lam, escape_plus, escape_minus, tol)
