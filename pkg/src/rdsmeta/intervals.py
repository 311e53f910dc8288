"""Finite unions of half-open rational intervals in [0, 1)."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Tuple

import numpy as np

__all__ = ["IntervalUnion", "as_fraction"]


def as_fraction(x) -> Fraction:
    """Parse an int, Fraction, float or ``"n/d"`` string exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(x)


class IntervalUnion:
    """Canonical union of intervals ``[a, b)`` with rational endpoints.

    Intervals are kept sorted, pairwise disjoint and with touching pieces
    merged, so equality of sets is equality of the endpoint tuples.
    Endpoints are treated as half-open; sets that differ only at finitely
    many points compare as equal after canonicalization.
    """

    __slots__ = ("pieces",)

    def __init__(self, pieces: Iterable[Tuple] = ()):
        items = sorted((as_fraction(a), as_fraction(b)) for a, b in pieces)
        merged = []
        for a, b in items:
            if b <= a:
                continue
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        self.pieces = tuple(merged)

    @classmethod
    def full(cls):
        return cls([(0, 1)])

    @classmethod
    def empty(cls):
        return cls()

    @classmethod
    def from_mask(cls, cuts, mask):
        """Union of cells ``[cuts[i], cuts[i+1])`` where ``mask[i]`` holds."""
        mask = np.asarray(mask, dtype=bool)
        if not mask.any():
            return cls()
        d = np.diff(np.concatenate(([0], mask.view(np.int8), [0])))
        starts = np.flatnonzero(d == 1)
        stops = np.flatnonzero(d == -1)
        return cls((cuts[i], cuts[j]) for i, j in zip(starts, stops))

    def __iter__(self):
        return iter(self.pieces)

    def __len__(self):
        return len(self.pieces)

    def __bool__(self):
        return bool(self.pieces)

    def __eq__(self, other):
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        if not self.pieces:
            return "IntervalUnion(empty)"
        return "IntervalUnion(" + " u ".join(f"[{a}, {b})" for a, b in self.pieces) + ")"

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.pieces), Fraction(0))

    def __or__(self, other):
        return IntervalUnion(self.pieces + other.pieces)

    def __and__(self, other):
        out = []
        i = j = 0
        P, Q = self.pieces, other.pieces
        while i < len(P) and j < len(Q):
            a = max(P[i][0], Q[j][0])
            b = min(P[i][1], Q[j][1])
            if a < b:
                out.append((a, b))
            if P[i][1] < Q[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion(out)

    def complement(self, lo=Fraction(0), hi=Fraction(1)):
        out = []
        x = Fraction(lo)
        for a, b in self.pieces:
            if a > x:
                out.append((x, min(a, hi)))
            x = max(x, b)
        if x < hi:
            out.append((x, hi))
        return IntervalUnion(out)

    def __sub__(self, other):
        return self & other.complement()

    def issubset(self, other) -> bool:
        return (self & other) == self

    def contains(self, x) -> bool:
        x = as_fraction(x)
        return any(a <= x < b for a, b in self.pieces)

    def contains_array(self, x) -> np.ndarray:
        """Vectorized float membership test (boundaries are measure zero)."""
        x = np.asarray(x, dtype=float)
        if not self.pieces:
            return np.zeros(x.shape, dtype=bool)
        lo = np.array([float(a) for a, _ in self.pieces])
        hi = np.array([float(b) for _, b in self.pieces])
        k = np.searchsorted(lo, x, side="right") - 1
        ok = k >= 0
        out = np.zeros(x.shape, dtype=bool)
        out[ok] = x[ok] < hi[k[ok]]
        return out

    def to_list(self):
        """JSON-friendly ``[["a/b", "c/d"], ...]``."""
        return [[str(a), str(b)] for a, b in self.pieces]
