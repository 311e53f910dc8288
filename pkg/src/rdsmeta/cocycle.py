"""Matrix cocycles over a symbolic base, Lyapunov exponents and Oseledets vectors.

Vectors are rows and act on the left, so the ``n``-step product is
``A(omega) A(theta omega) ... A(theta^{n-1} omega)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping, NamedTuple, Optional

import numpy as np

from .base import SymbolSequence, base_from_dict
from .errors import ConfigError, DegenerateSplittingError

__all__ = [
    "MatrixCocycle",
    "LyapunovReport",
    "OseledetsVectorPath",
    "LeadingExponent",
    "cocycle_product",
    "leading_lyapunov",
    "lyapunov_spectrum",
    "oseledets_vector",
    "lyapunov_of_vector",
    "load_matrix_config",
]

STRETCH_FLOOR = 1e-300
GAP_TOL = 1e-10


class MatrixCocycle:
    """Symbol-indexed nonnegative matrices.

    Parameters
    ----------
    matrices : mapping, optional
        ``symbol -> (k, k)`` array.  Symbols are 1-based.
    generator : callable, optional
        ``generator(omega) -> (k, k)`` array, for matrices depending on a
        window of ``omega`` rather than on ``omega_0`` alone.
    base : BaseSystem, optional
    """

    def __init__(self, matrices: Optional[Mapping[int, np.ndarray]] = None,
                 generator: Optional[Callable[[SymbolSequence], np.ndarray]] = None, base=None):
        if (matrices is None) == (generator is None):
            raise ValueError("give exactly one of matrices or generator")
        self.base = base
        self.generator = generator
        self.matrices = None
        if matrices is not None:
            mats = {}
            for sym, A in matrices.items():
                A = np.asarray(A)
                if A.ndim != 2 or A.shape[0] != A.shape[1]:
                    raise ValueError(f"matrix for symbol {sym} is not square")
                if (A < 0).any():
                    raise ValueError(f"matrix for symbol {sym} has negative entries")
                mats[int(sym)] = A
            dims = {A.shape[0] for A in mats.values()}
            if len(dims) != 1:
                raise ValueError("all matrices must share one dimension")
            self.matrices = mats
            self.k = dims.pop()
            self._float = {s: A.astype(float) for s, A in mats.items()}
        else:
            self.k = None

    @property
    def is_adjacency(self) -> bool:
        return self.matrices is not None and all(np.isin(A, (0, 1)).all() for A in self.matrices.values())

    def matrix(self, omega: SymbolSequence, n: int = 0) -> np.ndarray:
        """``A(theta^n omega)`` as a float array."""
        if self.matrices is not None:
            return self._float[omega[n]]
        A = np.asarray(self.generator(omega.shift(n)), dtype=float)
        if self.k is None:
            self.k = A.shape[0]
        return A

    def exact_matrix(self, omega, n=0):
        """``A(theta^n omega)`` as an object array of ints or Fractions."""
        if self.matrices is not None:
            A = self.matrices[omega[n]]
        else:
            A = np.asarray(self.generator(omega.shift(n)))
        return _to_exact(A)

    def dimension(self, omega=None) -> int:
        if self.k is None:
            self.matrix(omega, 0)
        return self.k


def _to_exact(A):
    A = np.asarray(A)
    if A.dtype == object:
        return A
    if np.issubdtype(A.dtype, np.integer) or np.all(A == np.round(A)):
        return np.vectorize(lambda x: int(x), otypes=[object])(A)
    return np.vectorize(lambda x: Fraction(x), otypes=[object])(A)


def cocycle_product(C: MatrixCocycle, omega: SymbolSequence, n: int, exact: bool = False) -> np.ndarray:
    """``A^{(n)}(omega)``; the identity for ``n = 0``.

    With ``exact=True`` the product is formed in big-integer (or Fraction)
    arithmetic, otherwise in float64 without rescaling.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    k = C.dimension(omega)
    if exact:
        P = _to_exact(np.eye(k, dtype=np.int64))
        for i in range(n):
            P = P.dot(C.exact_matrix(omega, i))
        return P
    P = np.eye(k)
    for i in range(n):
        P = P @ C.matrix(omega, i)
    return P


def _scaled_product(C, omega, a, b):
    """Product of ``A(theta^i omega)`` for ``a <= i < b``, rescaled to max entry 1."""
    P = np.eye(C.dimension(omega))
    for i in range(a, b):
        P = P @ C.matrix(omega, i)
        m = np.abs(P).max()
        if m > 0:
            P /= m
    return P


class LeadingExponent(NamedTuple):
    exponent: float
    log_stretch: np.ndarray
    annihilated_at: Optional[int] = None


def _push_exponent(C, omega, v, horizon):
    logs = np.empty(horizon)
    for n in range(horizon):
        v = v @ C.matrix(omega, n)
        c = np.abs(v).sum()
        if c == 0:
            logs[n:] = -np.inf
            return LeadingExponent(-np.inf, logs, n)
        logs[n] = np.log(c)
        v = v / c
    return LeadingExponent(float(logs.mean()), logs, None)


def leading_lyapunov(C: MatrixCocycle, omega: SymbolSequence, horizon: int, v0=None) -> LeadingExponent:
    """Top finite-time exponent from a positive start vector.

    Parameters
    ----------
    horizon : int
        Number of steps, at least 1.
    v0 : array_like, optional
        Positive start vector; uniform by default.

    Returns
    -------
    LeadingExponent
        ``(exponent, log_stretch, annihilated_at)`` where ``log_stretch[n]``
        is ``log ||v_n A(theta^n omega)||_1`` for the renormalized ``v_n``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    k = C.dimension(omega)
    v = np.full(k, 1.0 / k) if v0 is None else np.asarray(v0, dtype=float)
    if (v <= 0).any():
        raise ValueError("v0 must be strictly positive")
    return _push_exponent(C, omega, v / v.sum(), horizon)


def lyapunov_of_vector(C: MatrixCocycle, omega: SymbolSequence, v, horizon: int) -> float:
    """``(1/n) log(||v A^{(n)}(omega)||_1 / ||v||_1)`` with per-step renormalization."""
    v = np.asarray(v, dtype=float)
    s = np.abs(v).sum()
    if s == 0:
        raise ValueError("v must be nonzero")
    return _push_exponent(C, omega, v / s, horizon).exponent


@dataclass
class LyapunovReport:
    """Finite-time Lyapunov spectrum and diagnostics."""

    exponents: np.ndarray
    horizon: int
    N: int = 0
    M: int = 0
    log_stretch: np.ndarray = field(default_factory=lambda: np.empty(0))
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "exponents": [float(x) for x in self.exponents],
            "horizon": self.horizon,
            "N": self.N,
            "M": self.M,
            "log_stretch": [float(x) for x in self.log_stretch],
            "diagnostics": self.diagnostics,
        }


def lyapunov_spectrum(C: MatrixCocycle, omega: SymbolSequence, horizon: int, count: Optional[int] = None,
                      start: int = 0) -> LyapunovReport:
    """Leading `count` finite-time exponents by orthonormal frame push.

    The frame is re-orthonormalized (QR) after every step and the logs of
    the diagonal stretch factors are averaged.  A stretch below 1e-300
    marks that direction and all below it as ``-inf``.

    Parameters
    ----------
    start : int, default 0
        Index of the first matrix applied.
    """
    k = C.dimension(omega)
    count = k if count is None else count
    if not 1 <= count <= k:
        raise ValueError("count must lie in 1..k")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    Q = np.eye(k)[:count]
    acc = np.zeros(count)
    live = count
    logs = np.empty(horizon)
    for n in range(horizon):
        if live == 0:
            logs[n] = -np.inf
            continue
        F = Q[:live] @ C.matrix(omega, start + n)
        q, r = np.linalg.qr(F.T)
        d = np.abs(np.diag(r))
        dead = np.flatnonzero(d < STRETCH_FLOOR)
        if dead.size:
            live = int(dead[0])
            acc[live:] = -np.inf
            d = d[:live]
            q = q[:, :live]
        acc[:live] += np.log(d)
        logs[n] = np.log(d[0]) if live else -np.inf
        Q = q.T
    exps = acc / horizon
    return LyapunovReport(np.sort(exps)[::-1], horizon, log_stretch=logs)


@dataclass
class OseledetsVectorPath:
    """Approximate Oseledets vectors along an orbit.

    Attributes
    ----------
    index : int
        Target index ``l``.
    vectors : ndarray, shape (horizon + 1, k)
        ``vectors[n]`` approximates ``v(theta^n omega)``, unit 1-norm.
    scales : ndarray, shape (horizon,)
        ``||vectors[n] A(theta^n omega)||_1``.
    residuals : ndarray, shape (horizon,)
        ``||normalize(vectors[n] A) - vectors[n+1]||_1``.
    """

    index: int
    vectors: np.ndarray
    scales: np.ndarray
    residuals: np.ndarray
    N: int
    M: int
    singular_values: np.ndarray
    tol: float = 1e-4

    @property
    def horizon(self) -> int:
        return len(self.scales)

    @property
    def exponent(self) -> float:
        with np.errstate(divide="ignore"):
            return float(np.mean(np.log(self.scales)))

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0

    @property
    def within_tolerance(self) -> bool:
        return bool(np.all(np.isfinite(self.residuals)) and self.max_residual <= self.tol)

    def index_sets(self, sign=1):
        """1-based index sets ``{i : sign * v_i > 0}`` per step."""
        return [frozenset((np.flatnonzero(sign * v > 0) + 1).tolist()) for v in self.vectors]


def _top_left(P, count=1):
    U, s, Vt = np.linalg.svd(P)
    return U[:, :count].T, s


def _normal(C, omega, n, M, constraint):
    if constraint is not None:
        return constraint
    if M == 0:
        return None
    u, _ = _top_left(_scaled_product(C, omega, n, n + M))
    return u[0]


def _orient(v):
    j = int(np.argmax(np.abs(v)))
    return -v if v[j] < 0 else v


def oseledets_vector(C: MatrixCocycle, omega: SymbolSequence, ell: int = 2, N: int = 20, M: int = 20,
                     horizon: int = 40, constraint=None, tol: float = 1e-4) -> OseledetsVectorPath:
    """Approximate the ``l``-th Oseledets direction along ``omega``.

    The start vector lies in the span of the top-``l`` right singular
    vectors of the backward product ``A^{(N)}(theta^{-N} omega)`` (for
    ``N = 0``, the top-``l`` left singular vectors of the forward product).
    For ``l = 2`` it is taken orthogonal to the top left singular vector of
    the forward product ``A^{(M)}(omega)``, which approximates the slow
    hyperplane.  The vector is then pushed forward and, at every step,
    projected back onto that hyperplane along the concurrently pushed
    leading direction.

    Parameters
    ----------
    ell : {1, 2}
    N, M : int
        Backward and forward window lengths.
    horizon : int
        Number of forward steps.
    constraint : array_like, optional
        Known linear functional vanishing on the slow hyperplane (for
        example cell lengths for a mass-preserving cocycle).  Replaces the
        forward singular vector.
    tol : float
        Declared tolerance for the equivariance residuals.

    Raises
    ------
    DegenerateSplittingError
        If the relative singular-value gap at index ``l`` is below 1e-10.
    """
    if ell not in (1, 2):
        raise ValueError("ell must be 1 or 2")
    if N < 0 or M < 0 or horizon < 0:
        raise ValueError("N, M and horizon must be >= 0")
    k = C.dimension(omega)
    if ell > k:
        raise ValueError("ell exceeds dimension")
    c = None if constraint is None else np.asarray(constraint, dtype=float)

    if N > 0:
        _, s, Vt = np.linalg.svd(_scaled_product(C, omega, -N, 0))
        basis = Vt[:ell]
    elif ell == 1:
        s = np.ones(k)
        basis = np.full((1, k), 1.0)
    else:
        basis, s = _top_left(_scaled_product(C, omega, 0, max(M, 1)), ell)
    if ell < k and (s[ell - 1] == 0 or (s[ell - 1] - s[ell]) / s[ell - 1] < GAP_TOL):
        raise DegenerateSplittingError(f"singular values {s[ell - 1]:.3e} and {s[ell]:.3e} are not separated")

    lead = basis[0] * (1.0 if basis[0].sum() >= 0 else -1.0)
    if N == 0:
        lead = np.full(k, 1.0 / k)
    if ell == 1:
        v = lead.copy()
    else:
        u = _normal(C, omega, 0, M, c)
        r1, r2 = basis
        if u is None:
            v = r2.copy()
        else:
            v = (r2 @ u) * r1 - (r1 @ u) * r2
            if np.abs(v).sum() < 1e-14:
                v = r2 - (r2 @ u) / (u @ u) * u
    v = _orient(v / np.abs(v).sum())
    lead = lead / np.abs(lead).sum()

    vectors = np.empty((horizon + 1, k))
    vectors[0] = v
    scales = np.zeros(horizon)
    residuals = np.zeros(horizon)
    for n in range(horizon):
        A = C.matrix(omega, n)
        pushed = v @ A
        sc = np.abs(pushed).sum()
        scales[n] = sc
        if sc == 0:
            vectors[n + 1:] = 0.0
            residuals[n:] = np.nan
            break
        pushed /= sc
        lead = lead @ A
        lead /= np.abs(lead).sum()
        new = pushed
        if ell == 2:
            u = _normal(C, omega, n + 1, M, c)
            if u is not None and abs(lead @ u) > 0:
                new = pushed - (pushed @ u) / (lead @ u) * lead
                nn = np.abs(new).sum()
                if nn <= 1e-14:
                    # projected vector annihilated
                    vectors[n + 1:] = 0.0
                    residuals[n:] = np.nan
                    break
                new /= nn
        residuals[n] = np.abs(pushed - new).sum()
        vectors[n + 1] = new
        v = new
    return OseledetsVectorPath(ell, vectors, scales, residuals, N, M, np.asarray(s), tol)


def _matrix_from_json(rows):
    try:
        return np.array([[Fraction(x) if isinstance(x, str) else x for x in row] for row in rows])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad matrix entry: {exc}") from None


def cocycle_from_dict(d: dict) -> MatrixCocycle:
    """Build a :class:`MatrixCocycle` (with base, when present) from a parsed config."""
    if "matrices" not in d:
        raise ConfigError("config needs 'matrices'")
    base = base_from_dict(d) if "alphabet_size" in d else None
    try:
        mats = {int(k): _matrix_from_json(v) for k, v in d["matrices"].items()}
    except ValueError as exc:
        raise ConfigError(f"bad matrix symbol: {exc}") from None
    for key, A in mats.items():
        if any(isinstance(x, Fraction) for x in A.ravel()):
            mats[key] = A.astype(object)
        else:
            A = A.astype(float)
            mats[key] = A.astype(np.int64) if np.all(A == np.round(A)) else A
    if base is not None and set(mats) != set(range(1, base.alphabet_size + 1)):
        raise ConfigError("matrices must be given for every symbol 1..alphabet_size")
    try:
        return MatrixCocycle(mats, base=base)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_matrix_config(path) -> MatrixCocycle:
    """Read a matrix-cocycle JSON file."""
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return cocycle_from_dict(d)
