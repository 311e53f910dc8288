"""Binary digits of the fractional part of pi, exact.

Digits are produced from a fixed-point evaluation of Machin's formula in
integer arithmetic, so the stream can be extended indefinitely.  Digit
indices are 1-based: digit 1 is the first bit after the binary point.
"""
import threading

__all__ = ["pi_binary_digits", "DigitStream", "pi_digit"]

_GUARD_BITS = 64


def _arctan_inv(x, one):
    """Fixed-point ``arctan(1/x) * one`` via the alternating Taylor series."""
    total = term = one // x
    x2 = x * x
    k = 1
    sign = -1
    while term:
        term //= x2
        total += sign * (term // (2 * k + 1))
        sign = -sign
        k += 1
    return total


def _pi_fixed(bits):
    """Return floor(pi * 2**bits) up to a few units in the last place."""
    one = 1 << (bits + _GUARD_BITS)
    pi = 16 * _arctan_inv(5, one) - 4 * _arctan_inv(239, one)
    return pi >> _GUARD_BITS


def _fraction_bits(count):
    # Two precisions must agree on the requested prefix; otherwise the
    # truncation landed on a long run of equal bits and we widen.
    extra = 32
    while True:
        a = _pi_fixed(count + extra)
        b = _pi_fixed(count + 2 * extra)
        fa = (a - (3 << (count + extra))) >> extra
        fb = (b - (3 << (count + 2 * extra))) >> (2 * extra)
        if fa == fb:
            return fa
        extra *= 2


def pi_binary_digits(count):
    """First `count` bits of the binary expansion of pi - 3.

    Parameters
    ----------
    count : int
        Number of digits, at least 1.

    Returns
    -------
    list of int
        Bits in {0, 1}; element ``j`` is digit ``j + 1``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    value = _fraction_bits(count)
    return [(value >> (count - 1 - j)) & 1 for j in range(count)]


class DigitStream:
    """Memoized, thread-safe stream of pi's fractional binary digits.

    ``stream[j]`` is digit ``offset + j - 1`` counted from 1, i.e. with the
    default offset 1, ``stream[0]`` is the first fractional bit.
    """

    def __init__(self, offset=1):
        if offset < 1:
            raise ValueError("offset must be >= 1")
        self.offset = offset
        self._bits = []
        self._lock = threading.Lock()

    def digit(self, index):
        """Absolute digit ``index`` (1-based)."""
        if index < 1:
            raise IndexError("digit indices start at 1")
        bits = self._bits
        if index > len(bits):
            with self._lock:
                if index > len(self._bits):
                    want = max(index, 2 * len(self._bits), 256)
                    self._bits = pi_binary_digits(want)
                bits = self._bits
        return bits[index - 1]

    def __getitem__(self, j):
        return self.digit(self.offset + j)


_SHARED = DigitStream()


def pi_digit(index):
    """Digit ``index`` (1-based) of pi's fractional binary expansion."""
    return _SHARED.digit(index)
