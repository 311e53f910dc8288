"""Piecewise-affine interval maps, their transfer operators and step functions.

All geometry is exact.  A :class:`StepFunction` stores its cut points as
integer numerators over one common denominator (``int64`` while it fits,
Python ints otherwise), so refinement, composition and push-forward reduce
to exact integer array operations.  Cell values are float64 or, in exact
mode, object arrays of :class:`~fractions.Fraction`.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .base import SymbolSequence, base_from_dict
from .errors import ConfigError, HorizonTooLargeError, InvalidGError, MarkovViolationError
from .intervals import IntervalUnion, as_fraction

__all__ = [
    "Lap",
    "PiecewiseAffineMap",
    "MarkovPartition",
    "IntervalMapCocycle",
    "StepFunction",
    "transfer_matrix_markov",
    "ulam_matrix",
    "pf_apply",
    "pf_power",
    "preimage",
    "compose",
    "kappa_estimate",
    "FullSpectrumResult",
    "fullspectrum_f",
    "fullspectrum_eval",
    "doubling_map",
    "load_map_spec",
]

log = logging.getLogger(__name__)

_LIMIT = 1 << 62
MAX_CELLS = 1 << 16


# --------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class Lap:
    """Affine piece ``x -> slope * x + intercept`` on ``[a, b)`` with image in [0, 1]."""

    a: Fraction
    b: Fraction
    slope: Fraction
    intercept: Fraction
    branch: int

    def __call__(self, x):
        return self.slope * x + self.intercept

    @property
    def image(self):
        y0, y1 = self(self.a), self(self.b)
        return (y0, y1) if y0 < y1 else (y1, y0)

    def preimage(self, y):
        return (y - self.intercept) / self.slope


class PiecewiseAffineMap:
    """Map of [0, 1) given by affine branches, optionally reduced mod 1.

    Parameters
    ----------
    branches : sequence of (a, b, slope, intercept)
        Branch domains must tile [0, 1) in order.  Numbers may be ints,
        Fractions or ``"n/d"`` strings.
    mod_one : bool
        Reduce branch images mod 1.  Each branch is then split into laps
        on which no wrap occurs.
    """

    def __init__(self, branches: Sequence, mod_one: bool = True):
        br = [tuple(as_fraction(t) for t in b) for b in branches]
        if not br:
            raise ValueError("a map needs at least one branch")
        br.sort(key=lambda b: b[0])
        if br[0][0] != 0 or br[-1][1] != 1:
            raise ValueError("branch domains must cover [0, 1)")
        for (a0, b0, _, _), (a1, _, _, _) in zip(br, br[1:]):
            if b0 != a1:
                raise ValueError("branch domains must tile [0, 1) without gaps or overlaps")
        for a, b, s, _ in br:
            if not a < b:
                raise ValueError("empty branch domain")
            if s == 0:
                raise ValueError("slopes must be nonzero")
        self.branches = tuple(br)
        self.mod_one = bool(mod_one)
        self.laps = tuple(self._split())

    def _split(self):
        laps = []
        for idx, (a, b, s, c) in enumerate(self.branches):
            y0, y1 = s * a + c, s * b + c
            lo, hi = min(y0, y1), max(y0, y1)
            if not self.mod_one:
                if lo < 0 or hi > 1:
                    raise ValueError(f"branch {idx} leaves [0, 1]")
                laps.append(Lap(a, b, s, c, idx))
                continue
            ints = range(math.floor(lo) + 1, math.ceil(hi))
            xs = sorted({a, b} | {(k - c) / s for k in ints})
            for x0, x1 in zip(xs, xs[1:]):
                k = math.floor(min(s * x0 + c, s * x1 + c))
                laps.append(Lap(x0, x1, s, c - k, idx))
        return laps

    def __call__(self, x):
        x = as_fraction(x)
        for lap in self.laps:
            if lap.a <= x < lap.b:
                y = lap(x)
                return y - 1 if y == 1 else y
        raise ValueError("x must lie in [0, 1)")

    def apply_array(self, x) -> np.ndarray:
        """Float evaluation, for Monte Carlo sampling."""
        x = np.asarray(x, dtype=float)
        starts = np.array([float(l.a) for l in self.laps])
        s = np.array([float(l.slope) for l in self.laps])
        c = np.array([float(l.intercept) for l in self.laps])
        k = np.clip(np.searchsorted(starts, x, side="right") - 1, 0, len(starts) - 1)
        y = s[k] * x + c[k]
        return np.mod(y, 1.0)

    def endpoints(self):
        """Lap domain endpoints and lap image endpoints."""
        dom = {l.a for l in self.laps} | {Fraction(1)}
        img = set()
        for l in self.laps:
            img.update(l.image)
        return sorted(dom), sorted(img)

    def min_abs_slope(self):
        return min(abs(l.slope) for l in self.laps)

    def to_dict(self):
        return {
            "branches": [{"domain": [str(a), str(b)], "slope": str(s), "intercept": str(c)}
                         for a, b, s, c in self.branches],
            "mod_one": self.mod_one,
        }

    def __repr__(self):
        return f"PiecewiseAffineMap({len(self.branches)} branches, {len(self.laps)} laps)"


def doubling_map(shift=0) -> PiecewiseAffineMap:
    """``x -> 2x + shift mod 1``."""
    return PiecewiseAffineMap([(0, 1, 2, as_fraction(shift))], mod_one=True)


class MarkovPartition:
    """Strictly increasing rational cut points ``0 = p_0 < ... < p_q = 1``."""

    def __init__(self, cuts):
        cuts = [as_fraction(c) for c in cuts]
        if len(cuts) < 2 or cuts[0] != 0 or cuts[-1] != 1:
            raise ValueError("partition must start at 0 and end at 1")
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError("partition cuts must be strictly increasing")
        self.cuts = tuple(cuts)
        self._index = {c: i for i, c in enumerate(cuts)}

    @classmethod
    def uniform(cls, q):
        return cls([Fraction(i, q) for i in range(q + 1)])

    def __len__(self):
        return len(self.cuts) - 1

    def lengths(self):
        return [b - a for a, b in zip(self.cuts, self.cuts[1:])]

    def index(self, x):
        return self._index.get(x)

    def cells_of(self, union: IntervalUnion):
        """0-based cells contained in `union` (which must be a union of cells)."""
        return [i for i, (a, b) in enumerate(zip(self.cuts, self.cuts[1:]))
                if union.contains(a)]

    def union(self, cells) -> IntervalUnion:
        return IntervalUnion((self.cuts[i], self.cuts[i + 1]) for i in cells)

    def __eq__(self, other):
        return isinstance(other, MarkovPartition) and self.cuts == other.cuts


def transfer_matrix_markov(T: PiecewiseAffineMap, P: MarkovPartition, exact: bool = True) -> np.ndarray:
    """Matrix of the transfer operator on cell indicators.

    ``M[i, j]`` is the sum of ``1/|slope|`` over laps sending part of cell
    ``i`` onto cell ``j``, so that ``(L f)`` has coefficients ``f @ M``.

    Raises
    ------
    MarkovViolationError
        If a lap restricted to a cell has an image endpoint off the partition.
    """
    q = len(P)
    M = np.array([[Fraction(0)] * q for _ in range(q)], dtype=object)
    for i in range(q):
        c0, c1 = P.cuts[i], P.cuts[i + 1]
        for lap in T.laps:
            x0, x1 = max(c0, lap.a), min(c1, lap.b)
            if x0 >= x1:
                continue
            y0, y1 = sorted((lap(x0), lap(x1)))
            j0, j1 = P.index(y0), P.index(y1)
            if j0 is None or j1 is None:
                raise MarkovViolationError(i, lap.branch)
            w = 1 / abs(lap.slope)
            for j in range(j0, j1):
                M[i, j] += w
    return M if exact else M.astype(float)


def ulam_matrix(T: PiecewiseAffineMap, n_bins: int, exact: bool = True) -> np.ndarray:
    """Ulam matrix ``m(B_i & T^{-1} B_j) / m(B_i)`` on uniform bins, exact."""
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    q = n_bins
    M = np.array([[Fraction(0)] * q for _ in range(q)], dtype=object)
    for i in range(q):
        c0, c1 = Fraction(i, q), Fraction(i + 1, q)
        for lap in T.laps:
            x0, x1 = max(c0, lap.a), min(c1, lap.b)
            if x0 >= x1:
                continue
            y0, y1 = sorted((lap(x0), lap(x1)))
            w = q / abs(lap.slope)
            for j in range(max(0, math.floor(y0 * q)), min(q, math.ceil(y1 * q))):
                overlap = min(y1, Fraction(j + 1, q)) - max(y0, Fraction(j, q))
                if overlap > 0:
                    M[i, j] += overlap * w
    return M if exact else M.astype(float)


class IntervalMapCocycle:
    """Symbol-indexed piecewise-affine maps over a base system.

    Parameters
    ----------
    maps : mapping
        ``symbol -> PiecewiseAffineMap`` (symbols 1-based).
    base : BaseSystem, optional
    partition : MarkovPartition, optional
        When given, every map is checked to be Markov on it.
    """

    def __init__(self, maps: Mapping[int, PiecewiseAffineMap], base=None,
                 partition: Optional[MarkovPartition] = None):
        self.maps = {int(k): v for k, v in maps.items()}
        self.base = base
        self.partition = partition
        self._matrices = {}
        if partition is not None:
            for sym, T in self.maps.items():
                self._matrices[sym] = transfer_matrix_markov(T, partition)

    def map(self, omega: SymbolSequence, n: int = 0) -> PiecewiseAffineMap:
        return self.maps[omega[n]]

    def transfer_matrix(self, symbol: int, exact: bool = True):
        if self.partition is None:
            raise ValueError("cocycle has no Markov partition")
        M = self._matrices[symbol]
        return M if exact else M.astype(float)

    def matrix_cocycle(self):
        """The exact transfer-matrix cocycle on the Markov partition."""
        from .cocycle import MatrixCocycle

        return MatrixCocycle({s: self.transfer_matrix(s) for s in self.maps}, base=self.base)


# --------------------------------------------------------------------------
# step functions


def _lcm(*xs):
    return reduce(lambda a, b: a * b // math.gcd(a, b), xs, 1)


def _ints(values, bound):
    """Integer array with int64 storage when ``bound`` allows it."""
    if bound < _LIMIT:
        return np.asarray(values, dtype=np.int64)
    return np.array([int(v) for v in values], dtype=object)


def _affine(q, A, B, bound):
    """``A*q + B`` on an integer array, widening to Python ints if needed."""
    if bound < _LIMIT and q.dtype != object:
        return A * q + B
    return np.array([A * int(v) + B for v in q], dtype=object)


def _gcd_all(num, den):
    if num.dtype == object:
        return reduce(math.gcd, (int(v) for v in num), den)
    return math.gcd(int(np.gcd.reduce(num)), den)


def _reduced(num, den):
    g = _gcd_all(num, den)
    if g > 1:
        num = num // g
        den //= g
    if num.dtype == object and den < _LIMIT:
        num = num.astype(np.int64)
    return num, den


def _scale(num, den, new_den):
    f = new_den // den
    if f == 1:
        return num
    if new_den < _LIMIT and num.dtype != object:
        return num * f
    return np.array([int(v) * f for v in num], dtype=object)


def _scalar_dtype(values):
    return values.dtype == object


class StepFunction:
    """Piecewise-constant function on a rational partition of [0, 1).

    Parameters
    ----------
    cuts : sequence
        Rational cut points ``0 = c_0 < ... < c_m = 1``.
    values : array_like
        ``m`` cell values.  Object arrays of Fractions keep the function
        exact; anything else is stored as float64.

    Notes
    -----
    ``num`` and ``den`` hold the cuts as ``num / den``.  Values are
    right-continuous: ``f(c_i)`` is the value on ``[c_i, c_{i+1})``.
    """

    __slots__ = ("num", "den", "values")

    def __init__(self, cuts, values):
        fr = [as_fraction(c) for c in cuts]
        den = _lcm(*(c.denominator for c in fr))
        num = _ints([c.numerator * (den // c.denominator) for c in fr], den)
        self._set(num, den, values)

    @classmethod
    def _raw(cls, num, den, values):
        obj = cls.__new__(cls)
        num, den = _reduced(num, den)
        obj._set(num, den, values)
        return obj

    def _set(self, num, den, values):
        values = np.asarray(values)
        if values.dtype != object:
            values = values.astype(float)
        if len(num) != len(values) + 1:
            raise ValueError("need exactly one value per cell")
        if num[0] != 0 or num[-1] != den:
            raise ValueError("cuts must start at 0 and end at 1")
        self.num, self.den, self.values = num, den, values

    @classmethod
    def constant(cls, c, exact=False):
        v = np.array([Fraction(c)], dtype=object) if exact else [float(c)]
        return cls([0, 1], v)

    @classmethod
    def indicator(cls, union: IntervalUnion, exact=False):
        pts = sorted({Fraction(0), Fraction(1)} | {p for ab in union for p in ab})
        vals = [Fraction(1) if union.contains(a) else Fraction(0) for a in pts[:-1]]
        return cls(pts, np.array(vals, dtype=object) if exact else [float(v) for v in vals])

    @classmethod
    def on_partition(cls, P: MarkovPartition, coeffs):
        return cls(P.cuts, coeffs)

    @property
    def ncells(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    def cuts(self):
        """Cut points as Fractions."""
        return [Fraction(int(p), self.den) for p in self.num]

    def cut_array(self) -> np.ndarray:
        return np.asarray(self.num, dtype=float) / float(self.den)

    def _dn(self):
        return np.diff(self.num)

    def lengths(self):
        return self._dn().astype(float) / float(self.den)

    def astype_float(self):
        if not self.exact:
            return self
        return StepFunction._raw(self.num, self.den, self.values.astype(float))

    def astype_exact(self):
        if self.exact:
            return self
        vals = np.array([Fraction(float(v)) for v in self.values], dtype=object)
        return StepFunction._raw(self.num, self.den, vals)

    def _weighted_sum(self, v):
        dn = self._dn()
        if v.dtype == object or dn.dtype == object:
            return sum((Fraction(x) * int(d) for x, d in zip(v, dn)), Fraction(0)) / self.den
        return float(np.dot(v, dn.astype(float))) / float(self.den)

    def integral(self):
        """``int f dm``; a Fraction in exact mode."""
        return self._weighted_sum(self.values)

    def l1(self):
        return self._weighted_sum(abs(self.values))

    def sup(self):
        return max(abs(self.values))

    def var(self):
        """Total variation: sum of jumps between adjacent cells."""
        if self.ncells < 2:
            return Fraction(0) if self.exact else 0.0
        d = abs(np.diff(self.values))
        return sum(d, Fraction(0)) if self.exact else float(d.sum())

    def bv(self):
        """``max(||f||_1, var f)``."""
        return max(self.l1(), self.var())

    def __call__(self, x):
        x = as_fraction(x)
        if not 0 <= x <= 1:
            raise ValueError("x must lie in [0, 1]")
        i = int(np.searchsorted(self.num, x * self.den, side="right")) - 1
        return self.values[min(i, self.ncells - 1)]

    def evaluate(self, x) -> np.ndarray:
        """Vectorized float evaluation."""
        x = np.asarray(x, dtype=float)
        i = np.searchsorted(self.cut_array(), x, side="right") - 1
        return self.values[np.clip(i, 0, self.ncells - 1)]

    # -- grids --------------------------------------------------------------

    def index_of(self, x) -> int:
        """Index of the cut equal to rational `x` (which must be a cut)."""
        x = as_fraction(x)
        p = x * self.den
        if p.denominator != 1:
            raise ValueError(f"{x} is not a cut point")
        i = int(np.searchsorted(self.num, int(p)))
        if i >= len(self.num) or self.num[i] != int(p):
            raise ValueError(f"{x} is not a cut point")
        return i

    def refine(self, points) -> "StepFunction":
        """Same function with the rational `points` added as cuts."""
        pts = [as_fraction(p) for p in points]
        pts = [p for p in pts if 0 < p < 1]
        if not pts:
            return self
        den = _lcm(self.den, *(p.denominator for p in pts))
        num = _scale(self.num, self.den, den)
        new = sorted({p.numerator * (den // p.denominator) for p in pts})
        new = _ints(new, den)
        pos = np.searchsorted(num, new)
        present = (pos < len(num)) & (num[np.minimum(pos, len(num) - 1)] == new)
        new, pos = new[~present], pos[~present]
        if not len(new):
            return StepFunction._raw(num, den, self.values) if den != self.den else self
        out_num = np.insert(num, pos, new)
        out_vals = np.insert(self.values, pos, self.values[pos - 1])
        return StepFunction._raw(out_num, den, out_vals)

    def _resample(self, num, den):
        """Values on a grid ``num/den`` that refines this function's cuts."""
        L = _lcm(den, self.den)
        mine = _scale(self.num, self.den, L)
        theirs = _scale(num, den, L)
        idx = np.searchsorted(mine, theirs[:-1], side="right") - 1
        return self.values[idx]

    def _merge(self, other: "StepFunction"):
        L = _lcm(self.den, other.den)
        a = _scale(self.num, self.den, L)
        b = _scale(other.num, other.den, L)
        grid = np.union1d(a, b)
        if grid.dtype != object and a.dtype == object:
            grid = grid.astype(object)
        return grid, L, self._resample(grid, L), other._resample(grid, L)

    def _binary(self, other, op):
        if isinstance(other, StepFunction):
            if self.den == other.den and len(self.num) == len(other.num) and np.array_equal(self.num, other.num):
                return StepFunction._raw(self.num, self.den, op(self.values, other.values))
            small, big = (self, other) if self.ncells <= other.ncells else (other, self)
            if small.ncells <= 16:
                big = big.refine(small.cuts())
                sv = small._resample(big.num, big.den)
                vals = op(sv, big.values) if small is self else op(big.values, sv)
                return StepFunction._raw(big.num, big.den, vals)
            grid, L, va, vb = self._merge(other)
            return StepFunction._raw(grid, L, op(va, vb))
        return StepFunction._raw(self.num, self.den, op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.true_divide)

    def __neg__(self):
        return StepFunction._raw(self.num, self.den, -self.values)

    def __abs__(self):
        return StepFunction._raw(self.num, self.den, abs(self.values))

    def simplify(self) -> "StepFunction":
        """Merge adjacent cells carrying equal values."""
        if self.ncells < 2:
            return self
        keep = np.concatenate(([True], self.values[1:] != self.values[:-1]))
        if keep.all():
            return self
        idx = np.flatnonzero(keep)
        num = np.concatenate((self.num[idx], self.num[-1:]))
        return StepFunction._raw(num, self.den, self.values[idx])

    def coarsen(self, max_cells: int = MAX_CELLS) -> "StepFunction":
        """L1 projection onto at most `max_cells` groups of consecutive cells."""
        if self.ncells <= max_cells:
            return self
        idx = np.unique(np.linspace(0, self.ncells, max_cells + 1).round().astype(np.int64))
        dn = self._dn()
        if self.exact or dn.dtype == object:
            w = np.array([Fraction(int(d)) for d in dn], dtype=object)
            mass = np.add.reduceat(self.values * w, idx[:-1])
            tot = np.add.reduceat(w, idx[:-1])
        else:
            w = dn.astype(float)
            mass = np.add.reduceat(self.values * w, idx[:-1])
            tot = np.add.reduceat(w, idx[:-1])
        return StepFunction._raw(self.num[idx], self.den, mass / tot)

    def sign_sets(self):
        """``({f > 0}, {f < 0})`` as interval unions (zeros in neither)."""
        f = self.simplify()
        return _mask_union(f, f.values > 0), _mask_union(f, f.values < 0)

    def is_zero(self) -> bool:
        return not np.any(self.values != 0)

    def to_rows(self):
        """``(x_left, x_right, value)`` float rows."""
        c = self.cut_array()
        return np.column_stack((c[:-1], c[1:], self.values.astype(float)))

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"StepFunction({self.ncells} cells, den={self.den}, {kind})"


def _mask_union(f, mask):
    mask = np.asarray(mask, dtype=bool)
    d = np.diff(np.concatenate(([0], mask.view(np.int8), [0])))
    starts, stops = np.flatnonzero(d == 1), np.flatnonzero(d == -1)
    return IntervalUnion((Fraction(int(f.num[i]), f.den), Fraction(int(f.num[j]), f.den))
                         for i, j in zip(starts, stops))


def _vals_over(vals, s):
    if vals.dtype == object:
        return vals / abs(s)
    return vals / float(abs(s))


def pf_apply(T: PiecewiseAffineMap, f: StepFunction) -> StepFunction:
    """Exact Perron-Frobenius image ``L f``.

    On each output cell the value is the sum over laps of
    ``f(preimage) / |slope|``.  Mass is preserved exactly.
    """
    dom, _ = T.endpoints()
    f = f.refine(dom)
    D = f.den
    parts = []
    for lap in T.laps:
        ia, ib = f.index_of(lap.a), f.index_of(lap.b)
        p = f.num[ia:ib + 1]
        vals = _vals_over(f.values[ia:ib], lap.slope)
        s, c = lap.slope, lap.intercept
        den_l = D * s.denominator * c.denominator
        A = s.numerator * c.denominator
        B = c.numerator * D * s.denominator
        parts.append((p, den_l, A, B, vals, s < 0))
    L = _lcm(*(pt[1] for pt in parts))
    ys = []
    for p, den_l, A, B, vals, neg in parts:
        fct = L // den_l
        bound = (abs(A) * D + abs(B)) * fct
        y = _affine(p, A * fct, B * fct, bound)
        if neg:
            y, vals = y[::-1], vals[::-1]
        ys.append((y, vals))
    zero_one = _ints([0, L], L)
    grid = np.unique(np.concatenate([zero_one] + [y for y, _ in ys]))
    out = np.zeros(len(grid) - 1, dtype=f.values.dtype)
    if out.dtype == object:
        out[:] = Fraction(0)
    for y, vals in ys:
        j0 = int(np.searchsorted(grid, y[0]))
        j1 = int(np.searchsorted(grid, y[-1]))
        idx = np.searchsorted(y, grid[j0:j1], side="right") - 1
        out[j0:j1] += vals[idx]
    return StepFunction._raw(grid, L, out)


def pf_power(C: IntervalMapCocycle, omega: SymbolSequence, f: StepFunction, n: int,
             max_cells: Optional[int] = MAX_CELLS, start: int = 0):
    """Push `f` through ``n`` steps, returning the list ``[f, L f, ...]``.

    Each iterate is coarsened to at most `max_cells` cells when needed
    (``None`` disables coarsening).
    """
    path = [f]
    for i in range(n):
        f = pf_apply(C.map(omega, start + i), f)
        if max_cells is not None:
            f = f.coarsen(max_cells)
        path.append(f)
    return path


def compose(f: StepFunction, T: PiecewiseAffineMap) -> StepFunction:
    """Exact composition ``f o T``."""
    _, img = T.endpoints()
    f = f.refine(img)
    D = f.den
    parts = []
    for lap in sorted(T.laps, key=lambda l: l.a):
        y0, y1 = lap.image
        i0, i1 = f.index_of(y0), f.index_of(y1)
        q = f.num[i0:i1 + 1]
        vals = f.values[i0:i1]
        s, c = lap.slope, lap.intercept
        sg = 1 if s > 0 else -1
        den_l = D * c.denominator * abs(s.numerator)
        A = sg * s.denominator * c.denominator
        B = -sg * s.denominator * c.numerator * D
        parts.append((q, den_l, A, B, vals, s < 0))
    L = _lcm(*(pt[1] for pt in parts))
    xs, vs = [], []
    for n, (q, den_l, A, B, vals, neg) in enumerate(parts):
        fct = L // den_l
        bound = (abs(A) * D + abs(B)) * fct
        x = _affine(q, A * fct, B * fct, bound)
        if neg:
            x, vals = x[::-1], vals[::-1]
        xs.append(x if n == 0 else x[1:])
        vs.append(vals)
    return StepFunction._raw(np.concatenate(xs), L, np.concatenate(vs))


# --------------------------------------------------------------------------
# index of compactness


def kappa_estimate(C: IntervalMapCocycle, omega: SymbolSequence, n: int, max_states: int = 10 ** 7) -> float:
    """``(1/n) log(1 / min |(T^{(n)}_omega)'|)`` over the exact branch tree.

    Cylinders with the same image interval are merged, keeping the
    smallest derivative, since their futures coincide.

    Raises
    ------
    HorizonTooLargeError
        If more than `max_states` distinct images occur at one level.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    states = {(Fraction(0), Fraction(1)): Fraction(1)}
    for j in range(n):
        T = C.map(omega, j)
        new = {}
        for (lo, hi), d in states.items():
            for lap in T.laps:
                x0, x1 = max(lo, lap.a), min(hi, lap.b)
                if x0 >= x1:
                    continue
                y = tuple(sorted((lap(x0), lap(x1))))
                dd = d * abs(lap.slope)
                old = new.get(y)
                if old is None or dd < old:
                    new[y] = dd
            if len(new) > max_states:
                raise HorizonTooLargeError(f"more than {max_states} cylinder images at step {j + 1}")
        states = new
    dmin = min(states.values())
    return -(math.log(dmin.numerator) - math.log(dmin.denominator)) / n


# --------------------------------------------------------------------------
# eigenfunctions with prescribed exponent


@dataclass
class FullSpectrumResult:
    """Truncated series and its analytic sup-norm tail bound."""

    f: StepFunction
    tail_bound: float
    rho: float
    n_trunc: int
    premise_residual: float


FunctionFamily = Union[Mapping[int, StepFunction], Callable[[SymbolSequence], StepFunction]]


def _family(fam, omega, n):
    if fam is None:
        return None
    if callable(fam) and not isinstance(fam, Mapping):
        return fam(omega.shift(n))
    return fam[omega[n]]


def _family_members(fam, omega, n_terms):
    if isinstance(fam, Mapping):
        return list(fam.values())
    return [_family(fam, omega, n) for n in range(n_terms)]


def fullspectrum_f(C: IntervalMapCocycle, omega: SymbolSequence, rho: float, g: FunctionFamily,
                   h: Optional[FunctionFamily] = None, n_trunc: int = 20, check: bool = True,
                   premise_tol: float = 1e-12) -> FullSpectrumResult:
    """Truncated series ``sum_n e^{rho n} (g/h)_{theta^n omega} o T^{(n)}_omega * h_omega``.

    Parameters
    ----------
    rho : float
        Target exponent, ``rho <= 0``; ``-inf`` returns ``g_omega``.
    g : mapping or callable
        ``symbol -> StepFunction`` or ``omega -> StepFunction`` with
        ``L_omega g_omega = 0``.
    h : mapping or callable, optional
        Positive invariant density family; constant 1 by default.
    n_trunc : int
        Last series index included.

    Returns
    -------
    FullSpectrumResult
        The truncated function and the bound
        ``e^{rho (n+1)} sup|g/h| sup|h| / (1 - e^rho)`` on the sup norm of
        the omitted tail.

    Raises
    ------
    InvalidGError
        If some ``L g`` has L1 norm above `premise_tol`, or `h` is not
        positive.
    """
    if rho > 0:
        raise ValueError("rho must be <= 0")
    if n_trunc < 0:
        raise ValueError("n_trunc must be >= 0")
    terms = 1 if rho == -np.inf else n_trunc + 1
    premise = 0.0
    if check:
        seen = set()
        for n in range(terms):
            key = (omega[n], id(_family(g, omega, n))) if isinstance(g, Mapping) else n
            if key in seen:
                continue
            seen.add(key)
            r = float(pf_apply(C.map(omega, n), _family(g, omega, n)).l1())
            premise = max(premise, r)
            if r > premise_tol:
                raise InvalidGError(f"L g has L1 norm {r:.3e} at step {n}")
            if h is not None and not np.all(_family(h, omega, n).values > 0):
                raise InvalidGError(f"h is not positive at step {n}")

    def q(n):
        gn = _family(g, omega, n)
        return gn if h is None else gn / _family(h, omega, n)

    if rho == -np.inf:
        return FullSpectrumResult(_family(g, omega, 0), 0.0, rho, 0, premise)
    e = math.exp(rho)
    S = q(n_trunc)
    for m in range(n_trunc - 1, -1, -1):
        S = q(m) + compose(S, C.map(omega, m)) * e
    f = S if h is None else S * _family(h, omega, 0)

    gs = _family_members(g, omega, n_trunc + 1)
    if h is None:
        sup_q = max(float(x.sup()) for x in gs)
        sup_h = 1.0
    else:
        hs = _family_members(h, omega, n_trunc + 1)
        sup_h = max(float(x.sup()) for x in hs)
        sup_q = max(float((_family(g, omega, n) / _family(h, omega, n)).sup()) for n in range(n_trunc + 1))
    tail = e ** (n_trunc + 1) * sup_q * sup_h / (1 - e) if e < 1 else math.inf
    return FullSpectrumResult(f, tail, rho, n_trunc, premise)


def fullspectrum_eval(C: IntervalMapCocycle, omega: SymbolSequence, rho: float, g: FunctionFamily,
                      x, h: Optional[FunctionFamily] = None, n_trunc: int = 20) -> float:
    """Pointwise value of the truncated series at rational `x`, exact orbit."""
    x = as_fraction(x)
    total = 0.0
    h0 = 1.0 if h is None else float(_family(h, omega, 0)(x))
    y = x
    e = math.exp(rho) if rho != -np.inf else 0.0
    for n in range(n_trunc + 1 if e else 1):
        gn = float(_family(g, omega, n)(y))
        hn = 1.0 if h is None else float(_family(h, omega, n)(y))
        total += e ** n * gn / hn
        y = C.map(omega, n)(y)
    return total * h0


# --------------------------------------------------------------------------
# config


def _map_from_dict(d):
    try:
        branches = [(b["domain"][0], b["domain"][1], b["slope"], b["intercept"]) for b in d["branches"]]
        return PiecewiseAffineMap(branches, mod_one=bool(d.get("mod_one", True)))
    except (KeyError, TypeError, IndexError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad map entry: {exc}") from None


def cocycle_from_map_spec(d: dict) -> IntervalMapCocycle:
    """Build an :class:`IntervalMapCocycle` from a parsed map-spec."""
    if "maps" not in d:
        raise ConfigError("map-spec needs 'maps'")
    maps = {}
    for k, v in d["maps"].items():
        try:
            maps[int(k)] = _map_from_dict(v)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    P = None
    if d.get("markov_partition") is not None:
        try:
            P = MarkovPartition(d["markov_partition"])
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad partition: {exc}") from None
    base = base_from_dict(d) if "alphabet_size" in d else None
    return IntervalMapCocycle(maps, base=base, partition=P)


def load_map_spec(path) -> IntervalMapCocycle:
    """Read a map-spec JSON file."""
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return cocycle_from_map_spec(d)


def preimage(T: PiecewiseAffineMap, U: IntervalUnion) -> IntervalUnion:
    """Exact ``T^{-1}(U)`` as an interval union."""
    out = []
    for lap in T.laps:
        y0, y1 = lap.image
        for a, b in U:
            lo, hi = max(a, y0), min(b, y1)
            if lo < hi:
                x0, x1 = lap.preimage(lo), lap.preimage(hi)
                out.append((min(x0, x1), max(x0, x1)))
    return IntervalUnion(out)
