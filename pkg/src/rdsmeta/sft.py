"""Random shifts of finite type: cylinder counts, entropy and decomposition.

A random SFT is driven by a 0/1 matrix cocycle; ``A(theta^i omega)[a, b] = 1``
allows symbol ``b`` to follow ``a`` between times ``i`` and ``i + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .base import SymbolSequence
from .cocycle import MatrixCocycle, OseledetsVectorPath, cocycle_product, oseledets_vector

__all__ = [
    "RandomSFT",
    "SubshiftPath",
    "EntropyEstimate",
    "EntropyBoundsReport",
    "VectorBoundReport",
    "cylinder_count",
    "enumerate_cylinders",
    "uniform_aperiodicity",
    "entropy",
    "matrix_path_entropy",
    "decompose",
    "entropy_bounds_check",
    "vector_bound_check",
    "to_dot",
]


class RandomSFT:
    """Random shift of finite type over a matrix cocycle with 0/1 entries."""

    def __init__(self, cocycle: MatrixCocycle):
        if not cocycle.is_adjacency:
            raise ValueError("adjacency matrices must have entries in {0, 1}")
        self.cocycle = cocycle
        self.k = cocycle.k
        self.base = cocycle.base

    def matrix(self, omega, n=0):
        return self.cocycle.matrices[omega[n]]


@dataclass
class SubshiftPath:
    """Per-step 0/1 matrices of a subshift and the index sets generating them."""

    matrices: np.ndarray
    index_sets: List[frozenset] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.matrices)

    def __getitem__(self, n):
        return self.matrices[n]

    def to_dict(self):
        return {"matrices": self.matrices.astype(int).tolist(),
                "index_sets": [sorted(s) for s in self.index_sets]}


def cylinder_count(S: RandomSFT, omega: SymbolSequence, n: int) -> int:
    """Number of admissible words of length `n` starting at time 0 (exact)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return S.k
    return int(cocycle_product(S.cocycle, omega, n - 1, exact=True).sum())


def enumerate_cylinders(S: RandomSFT, omega: SymbolSequence, n: int, max_words: int = 10 ** 7) -> np.ndarray:
    """Explicit admissible words of length `n`, one per row (1-based symbols).

    Words are extended one symbol at a time by reading the allowed
    successors off each step's matrix; no matrix products are formed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    words = np.arange(1, S.k + 1, dtype=np.int8)[:, None]
    for i in range(n - 1):
        A = np.asarray(S.matrix(omega, i)) > 0
        succ = [np.flatnonzero(A[a]) + 1 for a in range(S.k)]
        last = words[:, -1] - 1
        reps = A.sum(axis=1)[last]
        if reps.sum() > max_words:
            raise ValueError("too many words to enumerate")
        nxt = np.concatenate([succ[a] for a in last]) if len(last) else np.empty(0, dtype=np.int64)
        words = np.column_stack((np.repeat(words, reps, axis=0), nxt.astype(np.int8)))
    return words


def uniform_aperiodicity(S: RandomSFT, max_N: int = 8) -> Optional[int]:
    """Smallest ``N <= max_N`` with every admissible ``N``-word product positive.

    Words are admissible under the base admissibility matrix when one is
    attached, and unrestricted otherwise.  Returns ``None`` if no such
    ``N`` exists.
    """
    mats = S.cocycle.matrices
    syms = sorted(mats)
    E = None if S.base is None else S.base.admissibility
    # distinct (last symbol, support pattern) pairs reachable by N-words
    level = {(s, (mats[s] > 0).tobytes()) for s in syms}
    shape = (S.k, S.k)
    for N in range(1, max_N + 1):
        if all(np.frombuffer(p, dtype=bool).all() for _, p in level):
            return N
        nxt = set()
        for last, p in level:
            P = np.frombuffer(p, dtype=bool).reshape(shape).astype(np.int64)
            for s in syms:
                if E is not None and not E[last - 1, s - 1]:
                    continue
                nxt.add((s, ((P @ mats[s]) > 0).tobytes()))
        level = nxt
    return None


@dataclass
class EntropyEstimate:
    value: float
    horizon: int
    cylinder_check: dict = field(default_factory=dict)


def _path_entropy(mats, n):
    # log ||1 A^{(n-1)}||_1 with renormalization
    v = np.ones(mats[0].shape[0])
    acc = 0.0
    for i in range(n - 1):
        v = v @ mats[i]
        c = v.sum()
        if c == 0:
            return -math.inf
        acc += math.log(c)
        v = v / c
    if n == 1:
        acc = math.log(v.size)
    return acc / n


def entropy(S: RandomSFT, omega: SymbolSequence, horizon: int, check_upto: int = 12) -> EntropyEstimate:
    """Finite-time topological entropy ``(1/n) log |C_n(omega)|`` at ``n = horizon``.

    The count is ``||1 A^{(n-1)}(omega)||_1``, computed with per-step
    renormalization.  ``cylinder_check`` holds the same quantity from exact
    integer counts for ``n <= check_upto``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    mats = [S.cocycle.matrix(omega, i) for i in range(max(horizon - 1, 1))]
    val = _path_entropy(mats, horizon)
    check = {}
    for n in range(1, min(check_upto, horizon) + 1):
        c = cylinder_count(S, omega, n)
        check[n] = math.log(c) / n if c else -math.inf
    return EntropyEstimate(val, horizon, check)


def matrix_path_entropy(mats: Sequence[np.ndarray], horizon: Optional[int] = None) -> float:
    """``(1/n) log ||1 M_0 ... M_{n-2}||_1`` for a finite list of matrices.

    ``horizon`` defaults to ``len(mats) + 1``; ``-inf`` on annihilation.
    """
    n = len(mats) + 1 if horizon is None else horizon
    if n < 1 or n - 1 > len(mats):
        raise ValueError("horizon out of range")
    if n == 1:
        return math.log(np.asarray(mats[0]).shape[0])
    return _path_entropy([np.asarray(m, dtype=float) for m in mats], n)


def decompose(S: RandomSFT, omega: SymbolSequence, ell: int = 2, N: int = 20, M: int = 20,
              horizon: int = 40, check_aperiodic: bool = True, max_N: int = 8):
    """Split the shift into the subshift ``B`` and its complement ``B'``.

    ``I^+(theta^n omega)`` is the positive support of the approximate
    ``l``-th Oseledets vector.  ``B`` keeps the A-edges from ``I^+`` at time
    ``n`` to ``I^+`` at time ``n + 1``; ``B'`` keeps the A-edges whose source
    has no outgoing and whose target has no incoming ``B``-edge.

    Returns
    -------
    B, B_prime : SubshiftPath
    v_path : OseledetsVectorPath
    """
    if ell < 2:
        raise ValueError("ell must be >= 2")
    if check_aperiodic and uniform_aperiodicity(S, max_N) is None:
        raise ValueError(f"shift is not uniformly aperiodic within N <= {max_N}")
    path = oseledets_vector(S.cocycle, omega, ell, N, M, horizon)
    I = path.index_sets()
    B = np.zeros((horizon, S.k, S.k), dtype=np.int8)
    Bp = np.zeros_like(B)
    for n in range(horizon):
        A = S.matrix(omega, n).astype(np.int8)
        rows = np.zeros(S.k, dtype=bool)
        cols = np.zeros(S.k, dtype=bool)
        rows[[i - 1 for i in I[n]]] = True
        cols[[j - 1 for j in I[n + 1]]] = True
        B[n] = A * np.outer(rows, cols)
        out_b = B[n].any(axis=1)
        in_b = B[n].any(axis=0)
        Bp[n] = A * np.outer(~out_b, ~in_b)
    Im = path.index_sets(-1)
    return SubshiftPath(B, I), SubshiftPath(Bp, Im), path


@dataclass
class EntropyBoundsReport:
    passed: bool
    h_B: float
    h_B_prime: float
    lam: float
    tol: float
    margin_B: float = field(init=False)
    margin_B_prime: float = field(init=False)

    def __post_init__(self):
        self.margin_B = self.h_B - (self.lam - self.tol)
        self.margin_B_prime = self.h_B_prime - (self.lam - self.tol)


def entropy_bounds_check(S: RandomSFT, B: SubshiftPath, B_prime: SubshiftPath, lam: float, tol: float,
                         horizon: Optional[int] = None) -> EntropyBoundsReport:
    """Check ``h(B) >= lam - tol`` and ``h(B') >= lam - tol``."""
    hb = matrix_path_entropy(B.matrices, horizon)
    hbp = matrix_path_entropy(B_prime.matrices, horizon)
    ok = hb >= lam - tol and hbp >= lam - tol
    return EntropyBoundsReport(bool(ok), hb, hbp, lam, tol)


@dataclass
class VectorBoundReport:
    passed: bool
    bound: float
    min_ratio: float
    max_ratio: float
    positivity_violations: List[int]


def vector_bound_check(S: RandomSFT, v_path, N: int) -> VectorBoundReport:
    """Check ``k^{-N} <= ||v^+||_1 / ||v^-||_1 <= k^N`` at every step.

    Steps where ``v^+`` or ``v^-`` vanishes are listed as positivity
    violations and fail the check.
    """
    vecs = v_path.vectors if isinstance(v_path, OseledetsVectorPath) else np.asarray(v_path)
    bound = float(S.k) ** N
    ratios, bad = [], []
    for n, v in enumerate(vecs):
        p = v[v > 0].sum()
        m = -v[v < 0].sum()
        if p == 0 or m == 0:
            bad.append(n)
            continue
        ratios.append(p / m)
    lo = min(ratios) if ratios else math.nan
    hi = max(ratios) if ratios else math.nan
    ok = not bad and lo >= 1 / bound and hi <= bound
    return VectorBoundReport(bool(ok), bound, float(lo), float(hi), bad)


def to_dot(A_mats, B: SubshiftPath, B_prime: SubshiftPath, start: int = 0, steps: int = 3,
           name: str = "decomposition") -> str:
    """Time-layered graph in DOT format.

    Nodes are ``(time, symbol)``; ``B`` edges are drawn solid red, ``B'``
    edges solid blue and the remaining A-edges dashed grey.
    """
    k = B.matrices.shape[1]
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for t in range(start, start + steps + 1):
        nodes = " ".join(f'"{t}_{i}" [label="{i}"];' for i in range(1, k + 1))
        lines.append(f"  subgraph cluster_{t} {{ label=\"n={t}\"; {nodes} }}")
    for t in range(start, start + steps):
        A = np.asarray(A_mats[t])
        for i in range(k):
            for j in range(k):
                if not A[i, j]:
                    continue
                if B.matrices[t][i, j]:
                    style = 'color="red"'
                elif B_prime.matrices[t][i, j]:
                    style = 'color="blue"'
                else:
                    style = 'color="grey", style="dashed"'
                lines.append(f'  "{t}_{i + 1}" -> "{t + 1}_{j + 1}" [{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
