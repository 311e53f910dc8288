"""Symbolic base systems: bi-infinite symbol sequences and the left shift.

Symbols are 1-based throughout (``{1, ..., s}``).  Binary sequences built from
digits of pi use the encoding ``0 -> 1`` and ``1 -> 2``.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConfigError, LiftError, OutOfWindowError
from .pidigits import pi_binary_digits, pi_digit

__all__ = [
    "SymbolSequence",
    "BaseSystem",
    "shift",
    "pi_binary_digits",
    "build_omega_star",
    "is_admissible",
    "lift_sequence",
    "EXAMPLE3_E",
    "load_base_config",
    "base_from_dict",
]

# An extension rule is None (unresolvable), a constant symbol, or a callable
# mapping an absolute index to a symbol.
Rule = Union[None, int, Callable[[int], int]]


class _Source:
    """Shared storage behind a family of shifted sequences."""

    def __init__(self, alphabet_size, lo, window, left, right, admissibility):
        self.alphabet_size = alphabet_size
        self.lo = lo
        self.window = tuple(int(s) for s in window)
        self.hi = lo + len(self.window) - 1
        self.left = left
        self.right = right
        self.admissibility = admissibility
        self._memo = {}
        self._lock = threading.Lock()

    def resolve(self, i):
        if self.lo <= i <= self.hi:
            return self.window[i - self.lo]
        memo = self._memo
        try:
            return memo[i]
        except KeyError:
            pass
        rule = self.left if i < self.lo else self.right
        if rule is None:
            raise OutOfWindowError(i)
        s = rule if isinstance(rule, (int, np.integer)) else rule(i)
        s = int(s)
        if not 1 <= s <= self.alphabet_size:
            raise ValueError(f"rule produced symbol {s} outside 1..{self.alphabet_size}")
        with self._lock:
            memo[i] = s
        return s


class SymbolSequence:
    """A point of a two-sided shift space, evaluated lazily.

    Parameters
    ----------
    alphabet_size : int
        Number of symbols ``s >= 2``.
    window : sequence of int
        Explicit symbols for indices ``lo, lo+1, ...``.
    lo : int, default 0
        Index of the first window entry.  The window must cover index 0.
    left, right : None, int or callable
        Extension for indices below/above the window.  ``None`` makes those
        indices unresolvable, an int is a constant fill and a callable is
        evaluated on the absolute index.
    admissibility : array_like, optional
        0/1 transition matrix; checked on the explicit window.

    Notes
    -----
    ``seq[i]`` is the symbol at index ``i``.  Shifted copies share the memo
    table of the original, so the sequence is immutable apart from caching.
    """

    def __init__(self, alphabet_size, window, lo=0, left: Rule = None, right: Rule = None,
                 admissibility=None, *, _source=None, _offset=0):
        if _source is None:
            if alphabet_size < 2:
                raise ValueError("alphabet_size must be >= 2")
            window = list(window)
            if not window or not lo <= 0 <= lo + len(window) - 1:
                raise ValueError("window must cover index 0")
            if any(not 1 <= int(s) <= alphabet_size for s in window):
                raise ValueError("window symbols must lie in 1..alphabet_size")
            E = None if admissibility is None else np.asarray(admissibility, dtype=np.int8)
            _source = _Source(alphabet_size, lo, window, left, right, E)
            if E is not None:
                for i in range(lo, lo + len(window) - 1):
                    if not E[_source.resolve(i) - 1, _source.resolve(i + 1) - 1]:
                        raise ValueError(f"window transition at {i} is not admissible")
        self._src = _source
        self.offset = _offset

    @property
    def alphabet_size(self) -> int:
        return self._src.alphabet_size

    @property
    def admissibility(self):
        return self._src.admissibility

    def __getitem__(self, i):
        return self._src.resolve(int(i) + self.offset)

    def __call__(self, i):
        return self[i]

    def values(self, lo, hi) -> np.ndarray:
        """Symbols at indices ``lo..hi`` inclusive."""
        return np.array([self[i] for i in range(lo, hi + 1)], dtype=np.int64)

    def shift(self, n=1) -> "SymbolSequence":
        """Return ``theta^n`` applied to this point."""
        return SymbolSequence(None, None, _source=self._src, _offset=self.offset + int(n))

    def __repr__(self):
        vals = []
        for i in range(-3, 6):
            try:
                vals.append(str(self[i]) if i else f"[{self[i]}]")
            except OutOfWindowError:
                vals.append("?")
        return f"SymbolSequence(s={self.alphabet_size}, ..., {', '.join(vals)}, ...)"


def shift(omega: SymbolSequence, n: int = 1) -> SymbolSequence:
    """Left shift ``(theta^n omega)_i = omega_{i+n}``."""
    return omega.shift(n)


@dataclass
class BaseSystem:
    """Alphabet, admissible transitions and an invariant measure.

    Parameters
    ----------
    alphabet_size : int
    admissibility : ndarray, optional
        0/1 matrix ``E``; ``None`` means the full shift.
    bernoulli : ndarray, optional
        Symbol weights for a Bernoulli measure.
    markov : ndarray, optional
        Row-stochastic matrix, zero exactly where ``E`` is zero.
    """

    alphabet_size: int
    admissibility: Optional[np.ndarray] = None
    bernoulli: Optional[np.ndarray] = None
    markov: Optional[np.ndarray] = None
    sequence: Optional[SymbolSequence] = field(default=None, repr=False)

    def __post_init__(self):
        s = self.alphabet_size
        if s < 2:
            raise ConfigError("alphabet_size must be >= 2")
        if self.admissibility is not None:
            E = np.asarray(self.admissibility)
            if E.shape != (s, s) or not np.isin(E, (0, 1)).all():
                raise ConfigError("admissibility must be an s x s 0/1 matrix")
            self.admissibility = E.astype(np.int8)
        if self.bernoulli is None and self.markov is None:
            self.bernoulli = np.full(s, 1.0 / s)
        if self.bernoulli is not None:
            p = np.asarray(self.bernoulli, dtype=float)
            if p.shape != (s,) or (p < 0).any() or abs(p.sum() - 1) > 1e-12:
                raise ConfigError("bernoulli weights must be nonnegative and sum to 1")
            self.bernoulli = p
        if self.markov is not None:
            P = np.asarray(self.markov, dtype=float)
            if P.shape != (s, s) or (P < 0).any() or np.abs(P.sum(axis=1) - 1).max() > 1e-12:
                raise ConfigError("markov matrix must be row-stochastic")
            if self.admissibility is not None and ((P > 0) != (self.admissibility > 0)).any():
                raise ConfigError("markov matrix must vanish exactly where admissibility does")
            self.markov = P

    def sample(self, rng: np.random.Generator, lo: int, hi: int) -> SymbolSequence:
        """Draw a random window ``lo..hi`` (with ``lo <= 0 <= hi``) from the measure."""
        s = self.alphabet_size
        n = hi - lo + 1
        if self.markov is None:
            syms = rng.choice(s, size=n, p=self.bernoulli) + 1
        else:
            w, V = np.linalg.eig(self.markov.T)
            pi = np.abs(np.real(V[:, np.argmin(np.abs(w - 1))]))
            pi /= pi.sum()
            syms = np.empty(n, dtype=np.int64)
            syms[0] = rng.choice(s, p=pi)
            for t in range(1, n):
                syms[t] = rng.choice(s, p=self.markov[syms[t - 1]])
            syms += 1
        return SymbolSequence(s, syms.tolist(), lo=lo, admissibility=self.admissibility)


def is_admissible(E, omega: SymbolSequence, lo: int, hi: int) -> bool:
    """True iff ``E[omega_i, omega_{i+1}] = 1`` for all ``lo <= i < hi``."""
    E = np.asarray(E)
    return all(E[omega[i] - 1, omega[i + 1] - 1] for i in range(lo, hi))


EXAMPLE3_E = np.array(
    [
        [0, 1, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 1],
        [1, 0, 0, 1, 0, 0],
        [0, 0, 1, 0, 0, 1],
        [1, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 1, 0],
    ],
    dtype=np.int8,
)


def _example3_alpha(i):
    if i == 0:
        return 0
    return pi_digit(2 * i) if i > 0 else pi_digit(-2 * i - 1)


def _h3(symbol):
    return 0 if symbol <= 3 else 1


class _Lift:
    """Unique E-admissible preimage of a binary sequence under a symbol map."""

    def __init__(self, E, hmap, alpha, start):
        self.E = np.asarray(E)
        self.hmap = hmap
        self.alpha = alpha
        self.memo = {0: start}
        self.lo = self.hi = 0
        self._lock = threading.Lock()

    def _step(self, prev, i, forward):
        k = self.E.shape[0]
        if forward:
            cands = [j + 1 for j in range(k) if self.E[prev - 1, j]]
        else:
            cands = [j + 1 for j in range(k) if self.E[j, prev - 1]]
        cands = [c for c in cands if self.hmap(c) == self.alpha(i)]
        if len(cands) != 1:
            raise LiftError(i, f"{len(cands)} admissible candidates")
        return cands[0]

    def __call__(self, i):
        with self._lock:
            while i > self.hi:
                self.hi += 1
                self.memo[self.hi] = self._step(self.memo[self.hi - 1], self.hi, True)
            while i < self.lo:
                self.lo -= 1
                self.memo[self.lo] = self._step(self.memo[self.lo + 1], self.lo, False)
            return self.memo[i]


def lift_sequence(E, hmap, alpha, start) -> SymbolSequence:
    """Lift ``alpha`` through ``hmap`` to an ``E``-admissible sequence.

    The lift is built outward from index 0 (where it equals `start`) and
    raises :class:`LiftError` wherever the admissible preimage is not unique.
    """
    E = np.asarray(E)
    if hmap(start) != alpha(0):
        raise LiftError(0, "start symbol does not project onto alpha_0")
    lift = _Lift(E, hmap, alpha, start)
    return SymbolSequence(E.shape[0], [start], lo=0, left=lift, right=lift, admissibility=E)


def _pi_sequence(offset, start, fill):
    # symbol at i >= start is digit(offset + i) + 1
    return SymbolSequence(
        2, [pi_digit(offset) + 1 if start <= 0 else fill], lo=0,
        left=lambda i: pi_digit(offset + i) + 1 if i >= start else fill,
        right=lambda i: pi_digit(offset + i) + 1,
    )


def build_omega_star(example: int, variant: str = "stated") -> SymbolSequence:
    """Reference base points used by the worked examples.

    Parameters
    ----------
    example : {2, 3, 4}
        2: ``omega_i = digit(i+1)`` for ``i >= 0`` and 0 otherwise.
        3: unique lift of the interleaved digit sequence through the 3-to-1
        symbol map, with ``omega_0 = 1``.
        4: ``omega_i = digit(20+i)`` for ``i > -20`` and 0 otherwise.
    variant : {"stated", "printed"}
        Only used for ``example=4``.  ``"printed"`` uses ``digit(39+i)``,
        which reproduces the commonly printed window for this example.

    Returns
    -------
    SymbolSequence
        Binary examples are encoded on ``{1, 2}``.
    """
    if example == 2:
        return _pi_sequence(1, 0, 1)
    if example == 3:
        return lift_sequence(EXAMPLE3_E, _h3, _example3_alpha, 1)
    if example == 4:
        if variant == "stated":
            return _pi_sequence(20, -19, 1)
        if variant == "printed":
            return _pi_sequence(39, -19, 1)
        raise ValueError(f"unknown variant {variant!r}")
    raise ValueError("example must be 2, 3 or 4")


def _sequence_from_dict(d, s, E):
    kind = d.get("kind")
    if kind == "pi_digits":
        if s != 2:
            raise ConfigError("pi_digits sequences need alphabet_size 2")
        offset = int(d.get("offset", 1))
        start = int(d.get("start", 0))
        fill = int(d.get("left_fill", 1))
        if offset + start < 1:
            raise ConfigError("pi_digits offset + start must be >= 1")
        if fill not in (1, 2):
            raise ConfigError("left_fill must be 1 or 2")
        return _pi_sequence(offset, start, fill)
    if kind == "explicit":
        try:
            syms = [int(x) for x in d["symbols"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"explicit sequence needs integer 'symbols': {exc}") from None
        try:
            return SymbolSequence(s, syms, lo=int(d.get("lo", 0)), left=d.get("left_fill"),
                                  right=d.get("right_fill"), admissibility=E)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown sequence kind {kind!r}")


def base_from_dict(d: dict) -> BaseSystem:
    """Build a :class:`BaseSystem` from a parsed JSON config."""
    try:
        s = int(d["alphabet_size"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("config needs an integer 'alphabet_size'") from None
    E = d.get("admissibility")
    E = None if E is None else np.asarray(E)
    measure = d.get("measure") or {}
    base = BaseSystem(s, E, bernoulli=measure.get("bernoulli"), markov=measure.get("markov"))
    if "sequence" in d:
        base.sequence = _sequence_from_dict(d["sequence"], s, base.admissibility)
    return base


def load_base_config(path) -> BaseSystem:
    """Read a base-system JSON file."""
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return base_from_dict(d)
