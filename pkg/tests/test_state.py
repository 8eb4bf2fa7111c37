import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entangle_lab.errors import DimensionTooLarge, ParseError, PreconditionError
from entangle_lab.gf2 import LinearCode
from entangle_lab.state import (
    StateVector,
    classify_measurement,
    cyc_mul,
    cyc_norm2,
    cyc_to_complex,
    energy,
    entanglement_order,
    format_state,
    indicator_from_code,
    measure,
    par,
    parse_state_text,
    tensor_factorize,
)
from entangle_lab.transforms import H, apply_gate

cyc = st.lists(st.integers(-20, 20), min_size=4, max_size=4)


@given(cyc, cyc)
def test_cyclotomic_product_matches_complex(x, y):
    a = np.array(x, dtype=np.int64).reshape(4, 1)
    b = np.array(y, dtype=np.int64).reshape(4, 1)
    got = cyc_to_complex(cyc_mul(a, b))[0]
    want = cyc_to_complex(a)[0] * cyc_to_complex(b)[0]
    assert abs(got - want) < 1e-9


@given(cyc)
def test_cyclotomic_norm(x):
    a = np.array(x, dtype=np.int64).reshape(4, 1)
    r, t = cyc_norm2(a)
    assert abs(r[0] + t[0] * np.sqrt(2) - abs(cyc_to_complex(a)[0]) ** 2) < 1e-7


def test_zero_vector_rejected():
    with pytest.raises(PreconditionError):
        StateVector.from_ints([0, 0])


def test_bad_length():
    with pytest.raises(ValueError):
        StateVector.from_ints([1, 0, 1])


def test_indicator_and_par():
    c = LinearCode.from_strings(["110", "011"])
    s = indicator_from_code(c)
    assert list(s.real_ints()) == [1, 0, 0, 1, 0, 1, 1, 0]
    assert par(s) == Fraction(2)
    assert energy(s) == 4


def test_par_flat_and_peak():
    assert par(StateVector.from_pm_string("++-+")) == 1
    assert par(StateVector.from_ints([1, 0, 0, 0])) == 4


def test_par_float_matches_exact():
    s = StateVector.from_ints([3, 1, -1, 0])
    assert abs(par(s.to_float()) - float(par(s))) < 1e-12


def test_hadamard_twice_is_exact_identity():
    s = StateVector.from_ints([1, -1, 0, 2])
    t = apply_gate(apply_gate(s, 1, H), 1, H)
    assert t.same_as(s)
    assert t.scale_exp == 2 and t.canonical().scale_exp == 0


def test_same_as_odd_scale():
    # (1,1)/sqrt2 versus H|0>
    s = apply_gate(StateVector.from_ints([1, 0]), 0, H)
    assert s.same_as(StateVector.from_ints([1, 1], scale_exp=1))
    assert not s.same_as(StateVector.from_ints([1, 1]))


def test_proportional_sign():
    s = StateVector.from_ints([1, -1])
    assert s.proportional_to(StateVector.from_ints([-2, 2]), positive=False)
    assert not s.proportional_to(StateVector.from_ints([-2, 2]))


def test_measure_probability():
    s = StateVector.from_ints([1, 0, 1, 0])
    r, p = measure(s, 0, 0)
    assert p == 1 and list(r.real_ints()) == [1, 1]
    with pytest.raises(PreconditionError):
        measure(s, 0, 1)
    _, p = measure(s, 1, 1)
    assert p == Fraction(1, 2)


def test_measure_float():
    s = StateVector.from_ints([1, 0, 1, 0]).to_float()
    _, p = measure(s, 1, 0)
    assert abs(p - 0.5) < 1e-12


def _codewords_brute(c):
    rows = list(c.generator.rows)
    out = set()
    for coeffs in itertools.product((0, 1), repeat=len(rows)):
        w = 0
        for bit, r in zip(coeffs, rows):
            if bit:
                w ^= r
        out.add(w)
    return out


def test_classify_measurement_random_codes():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, n + 1))
        rows = [int(x) for x in rng.integers(0, 1 << n, size=k)]
        if not any(rows):
            continue
        c = LinearCode.from_rows(rows, n)
        s = indicator_from_code(c)
        q = int(rng.integers(0, n))
        words = _codewords_brute(c)
        ones = sum((w >> q) & 1 for w in words)
        expected = "redundant" if ones == 0 else "destructive"
        assert ones in (0, len(words) // 2)
        assert classify_measurement(s, q) == expected


def test_classify_rejects_non_flat():
    with pytest.raises(PreconditionError):
        classify_measurement(StateVector.from_ints([2, 1, 0, 0]), 0)


def test_factorize_examples():
    assert tensor_factorize(StateVector.from_ints([1, 0, 1, 0])).blocks == (frozenset({0}), frozenset({1}))
    assert tensor_factorize(StateVector.from_ints([1, 0, 0, 1])).blocks == (frozenset({0, 1}),)
    bell = np.array([1, 0, 0, 1])
    v = np.kron(bell, bell)  # qubits (2,3) high, (0,1) low
    assert tensor_factorize(StateVector.from_ints(v)).blocks == (frozenset({0, 1}), frozenset({2, 3}))
    assert entanglement_order(StateVector.from_ints(v)) == 2
    assert entanglement_order(StateVector.from_ints([1, 1, 1, 1])) == 0


def _interleave(parts, blocks, n):
    """Amplitudes of the tensor product where parts[b] lives on qubits blocks[b]."""
    out = np.ones(1 << n, dtype=np.int64)
    idx = np.arange(1 << n)
    for vec, qs in zip(parts, blocks):
        local = np.zeros_like(idx)
        for pos, q in enumerate(qs):
            local |= ((idx >> q) & 1) << pos
        out *= vec[local]
    return out


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_factorize_recovers_random_products(data):
    n = data.draw(st.integers(2, 7))
    perm = data.draw(st.permutations(range(n)))
    cuts = sorted(data.draw(st.sets(st.integers(1, n - 1), max_size=n - 1)))
    blocks = [sorted(perm[a:b]) for a, b in zip([0, *cuts], [*cuts, n])]
    parts = []
    for qs in blocks:
        vec = np.array(data.draw(st.lists(st.integers(-3, 3), min_size=1 << len(qs), max_size=1 << len(qs))))
        if not vec.any():
            vec[0] = 1
        parts.append(vec)
    s = StateVector.from_ints(_interleave(parts, blocks, n))
    found = tensor_factorize(s).blocks
    # the finest partition refines the construction
    for b in found:
        assert any(b <= set(qs) for qs in blocks)
    assert set().union(*found) == set(range(n))


def test_factorize_guard():
    with pytest.raises(DimensionTooLarge):
        tensor_factorize(StateVector.from_ints([1] + [0] * ((1 << 15) - 1)))


def test_state_text_round_trip():
    s = apply_gate(StateVector.from_ints([1, 0, 0, -1]), 0, H)
    t = parse_state_text(format_state(s))
    assert t.same_as(s)
    f = s.to_float()
    assert parse_state_text(format_state(f)).same_as(f)
    assert list(parse_state_text("+-0+\n").real_ints()) == [1, -1, 0, 1]


@pytest.mark.parametrize("text", ["n=1\n1 0 0 0\n", "m=1\n", "n=1\n1 0\n1 0 0 0\n", "n=1\nx y\n0 0\n"])
def test_state_text_errors(text):
    with pytest.raises(ParseError):
        parse_state_text(text)
