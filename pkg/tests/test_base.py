"""Digits of pi, symbol sequences, shifts and the reference base points."""
import json
import threading
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdsmeta.base import (
    EXAMPLE3_E,
    BaseSystem,
    SymbolSequence,
    base_from_dict,
    build_omega_star,
    is_admissible,
    load_base_config,
    shift,
)
from rdsmeta.errors import ConfigError, LiftError, OutOfWindowError
from rdsmeta.pidigits import DigitStream, pi_binary_digits, pi_digit

PI_220 = (
    "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214"
    "808651328230664709384460955058223172535940812848111745028410270193852110555964462294895493038196442881097"
    "5665933446"
)


def long_division_bits(decimal: str, count: int):
    """Binary fraction digits by repeated doubling of an exact decimal."""
    x = Fraction(decimal) - 3
    bits = []
    for _ in range(count):
        x *= 2
        b = int(x)
        bits.append(b)
        x -= b
    return bits


def mpmath_bits(count):
    with mpmath.workprec(count + 64):
        x = mpmath.pi - 3
        return [int(mpmath.floor(x * 2 ** k)) % 2 for k in range(1, count + 1)]


class TestPiDigits:
    def test_first_eight(self):
        assert pi_binary_digits(8) == [0, 0, 1, 0, 0, 1, 0, 0]

    def test_first_fifteen(self):
        assert pi_binary_digits(15) == [0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1]

    def test_long_division_oracle(self):
        # 220 decimals carry about 730 bits; compare well inside that
        assert pi_binary_digits(600) == long_division_bits(PI_220, 600)

    def test_mpmath_oracle(self):
        assert pi_binary_digits(1500) == mpmath_bits(1500)

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            pi_binary_digits(0)

    @given(st.integers(1, 300), st.integers(1, 300))
    @settings(max_examples=25, deadline=None)
    def test_prefix_property(self, n, m):
        n, m = min(n, m), max(n, m)
        assert pi_binary_digits(m)[:n] == pi_binary_digits(n)

    def test_stream_memoized_and_offset(self):
        s = DigitStream(offset=20)
        bits = pi_binary_digits(80)
        assert [s[j] for j in range(10)] == bits[19:29]
        assert s[0] == s[0] == pi_digit(20)

    def test_stream_threadsafe(self):
        s = DigitStream(offset=1)
        out = {}

        def work(k):
            out[k] = [s[j] for j in range(0, 400, 7)]

        threads = [threading.Thread(target=work, args=(k,)) for k in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        ref = pi_binary_digits(400)
        for v in out.values():
            assert v == ref[0:400:7]


class TestSymbolSequence:
    def test_shift_zero_is_identity(self):
        w = build_omega_star(2)
        assert list(shift(w, 0).values(-5, 20)) == list(w.values(-5, 20))

    def test_shift_composition(self):
        w = build_omega_star(2)
        assert shift(shift(w, 2), 3)[0] == w[5]

    @given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-20, 20))
    @settings(max_examples=50, deadline=None)
    def test_shift_group_law(self, a, b, i):
        w = build_omega_star(2)
        assert w.shift(a).shift(b)[i] == w.shift(a + b)[i]

    def test_out_of_window(self):
        w = SymbolSequence(3, [1, 2, 3], lo=-1)
        assert w[-1] == 1 and w[1] == 3
        with pytest.raises(OutOfWindowError):
            w[2]
        with pytest.raises(OutOfWindowError):
            w.shift(5)[0]

    def test_constant_rules(self):
        w = SymbolSequence(2, [2], left=1, right=2)
        assert list(w.values(-3, 3)) == [1, 1, 1, 2, 2, 2, 2]

    def test_invalid_window(self):
        with pytest.raises(ValueError):
            SymbolSequence(2, [3])
        with pytest.raises(ValueError):
            SymbolSequence(2, [1, 2], lo=1)
        with pytest.raises(ValueError):
            SymbolSequence(1, [1])

    def test_admissibility_enforced(self):
        with pytest.raises(ValueError):
            SymbolSequence(6, [1, 1], admissibility=EXAMPLE3_E)


class TestOmegaStar:
    def test_example2_window(self):
        w = build_omega_star(2)
        assert [w[i] - 1 for i in range(-2, 15)] == [0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1]

    def test_example2_shift(self):
        assert shift(build_omega_star(2), 1)[0] - 1 == 0

    def test_example2_digits(self):
        w = build_omega_star(2)
        assert [w[i] - 1 for i in range(15)] == pi_binary_digits(15)

    def test_example3_start(self):
        assert build_omega_star(3)[0] == 1

    def test_example3_lift_projects_and_is_admissible(self):
        w = build_omega_star(3)
        bits = pi_binary_digits(200)
        for i in range(-60, 61):
            alpha = 0 if i == 0 else (bits[2 * i - 1] if i > 0 else bits[-2 * i - 2])
            assert (0 if w[i] <= 3 else 1) == alpha
        assert is_admissible(EXAMPLE3_E, w, -60, 60)

    def test_example3_printed_window(self):
        w = build_omega_star(3)
        assert list(w.values(0, 7)) == [1, 2, 3, 4, 3, 1, 5, 4]
        assert is_admissible(EXAMPLE3_E, w, 0, 7)

    def test_example4_stated_rule(self):
        w = build_omega_star(4)
        bits = pi_binary_digits(100)
        assert w[1] - 1 == bits[20]
        assert [w[i] - 1 for i in range(-19, 40)] == bits[0:59]
        assert w[-20] == w[-100] == 1

    def test_example4_printed_variant_reproduces_window(self):
        printed = [1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 1, 1, 0]
        w = build_omega_star(4, variant="printed")
        assert [w[i] - 1 for i in range(-10, 11)] == printed
        stated = build_omega_star(4)
        assert [stated[i] - 1 for i in range(-10, 11)] != printed

    def test_bad_example(self):
        with pytest.raises(ValueError):
            build_omega_star(5)
        with pytest.raises(ValueError):
            build_omega_star(4, variant="other")


class TestAdmissibility:
    def test_full_shift(self):
        assert is_admissible(np.ones((2, 2)), build_omega_star(2), -5, 30)

    def test_example3_rejects_repeat(self):
        w = SymbolSequence(6, [1, 1], lo=0)
        assert not is_admissible(EXAMPLE3_E, w, 0, 1)

    def test_lift_error(self):
        from rdsmeta.base import lift_sequence

        # both symbols project to 0, so the successor is not unique
        w = lift_sequence(np.ones((2, 2)), lambda s: 0, lambda i: 0, 1)
        with pytest.raises(LiftError):
            w[1]
        with pytest.raises(LiftError):
            lift_sequence(np.ones((2, 2)), lambda s: s - 1, lambda i: 0, 2)


class TestBaseSystem:
    def test_bernoulli_default(self):
        b = BaseSystem(3)
        assert np.allclose(b.bernoulli, 1 / 3)

    def test_invalid_measures(self):
        with pytest.raises(ConfigError):
            BaseSystem(2, bernoulli=[0.7, 0.4])
        with pytest.raises(ConfigError):
            BaseSystem(2, markov=[[0.5, 0.6], [0.5, 0.5]])
        with pytest.raises(ConfigError):
            BaseSystem(6, admissibility=EXAMPLE3_E, markov=np.full((6, 6), 1 / 6))

    def test_markov_example3(self):
        b = BaseSystem(6, admissibility=EXAMPLE3_E, markov=EXAMPLE3_E / 2)
        w = b.sample(np.random.default_rng(0), -20, 50)
        assert is_admissible(EXAMPLE3_E, w, -20, 50)

    def test_sample_deterministic(self):
        b = BaseSystem(2)
        w1 = b.sample(np.random.default_rng(5), -3, 10)
        w2 = b.sample(np.random.default_rng(5), -3, 10)
        assert list(w1.values(-3, 10)) == list(w2.values(-3, 10))

    def test_config_roundtrip(self, tmp_path):
        d = {"alphabet_size": 2, "measure": {"bernoulli": [0.5, 0.5]},
             "sequence": {"kind": "pi_digits", "offset": 1, "start": 0, "left_fill": 1}}
        p = tmp_path / "base.json"
        p.write_text(json.dumps(d))
        b = load_base_config(p)
        assert [b.sequence[i] for i in range(-1, 6)] == [build_omega_star(2)[i] for i in range(-1, 6)]

    def test_explicit_sequence(self):
        b = base_from_dict({"alphabet_size": 3, "sequence": {"kind": "explicit", "symbols": [1, 2, 3], "lo": -1,
                                                             "left_fill": 1, "right_fill": 3}})
        assert list(b.sequence.values(-3, 3)) == [1, 1, 1, 2, 3, 3, 3]

    @pytest.mark.parametrize("bad", [
        {},
        {"alphabet_size": "x"},
        {"alphabet_size": 2, "sequence": {"kind": "nope"}},
        {"alphabet_size": 3, "sequence": {"kind": "pi_digits"}},
        {"alphabet_size": 2, "sequence": {"kind": "explicit", "symbols": [3]}},
    ])
    def test_bad_configs(self, bad):
        with pytest.raises(ConfigError):
            base_from_dict(bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_base_config(tmp_path / "none.json")
