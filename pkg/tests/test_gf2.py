import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entangle_lab.errors import ParseError, PreconditionError
from entangle_lab.gf2 import (
    BinaryMatrix,
    LinearCode,
    dual_code,
    enumerate_codewords,
    format_code,
    null_space,
    parse_code_text,
    rank,
    rref,
    str_to_word,
    weight_hierarchy_oracle,
    word_to_str,
)


def brute_rank(rows, cols):
    # size of the row span by enumeration
    span = {0}
    for r in rows:
        span |= {s ^ r for s in span}
    return len(span).bit_length() - 1


@given(st.integers(0, 2**12 - 1))
def test_word_string_round_trip(w):
    assert str_to_word(word_to_str(w, 12)) == w


def test_word_string_order():
    assert word_to_str(0b011, 3) == "110"


@given(st.lists(st.integers(0, 63), max_size=7))
def test_rank_matches_span_size(rows):
    assert rank(rows) == brute_rank(rows, 6)


@given(st.lists(st.integers(0, 63), max_size=7))
def test_rank_of_transpose(rows):
    m = BinaryMatrix(tuple(rows), 6)
    assert rank(m) == rank(m.transpose())


@given(st.lists(st.integers(0, 255), max_size=6))
def test_null_space_is_orthogonal_complement(rows):
    ns = null_space(rows, 8)
    assert len(ns) == 8 - rank(rows)
    for v in ns:
        assert all(bin(v & r).count("1") % 2 == 0 for r in rows)


def test_rref_pivots():
    red, piv = rref([0b110, 0b011], 3)
    assert rank(red) == 2
    assert len(piv) == 2


def test_dependent_generator_rejected():
    with pytest.raises(PreconditionError):
        LinearCode(3, BinaryMatrix((0b011, 0b011), 3))


def test_dual_of_parity_code():
    c = LinearCode.from_strings(["110", "011"])
    d = dual_code(c)
    assert d.k == 1 and d.min_distance() == 3
    assert d.same_code(LinearCode.from_strings(["111"]))


@given(st.lists(st.integers(1, 255), min_size=1, max_size=5))
def test_dual_is_involution(rows):
    c = LinearCode.from_rows(rows, 8)
    assert dual_code(dual_code(c)).same_code(c)
    assert dual_code(c).k == 8 - c.k


def test_codewords_and_distance():
    c = LinearCode.from_strings(["11010", "01101"])
    words = enumerate_codewords(c)
    assert sorted(word_to_str(w, 5) for w in words) == ["00000", "01101", "10111", "11010"]
    assert c.min_distance() == 3


def test_weight_hierarchy_523():
    c = LinearCode.from_strings(["11010", "01101"])
    assert weight_hierarchy_oracle(c).d == (0, 3, 5)


def _brute_hierarchy(c):
    # every j-subset of codewords spanning a j-dim space, support of the span
    words = sorted(enumerate_codewords(c))
    out = [0]
    for j in range(1, c.k + 1):
        best = None
        for combo in itertools.combinations([w for w in words if w], j):
            if rank(list(combo)) < j:
                continue
            supp = 0
            for w in combo:
                supp |= w
            best = min(best or 99, bin(supp).count("1"))
        out.append(best)
    return tuple(out)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 63), min_size=1, max_size=3))
def test_hierarchy_against_tuple_enumeration(rows):
    c = LinearCode.from_rows(rows, 6)
    assert weight_hierarchy_oracle(c).d == _brute_hierarchy(c)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 127), min_size=1, max_size=4))
def test_wei_duality(rows):
    # {d_r(C)} and {n + 1 - d_r(C_perp)} partition {1..n}
    c = LinearCode.from_rows(rows, 7)
    a = set(weight_hierarchy_oracle(c).d[1:])
    b = {8 - d for d in weight_hierarchy_oracle(dual_code(c)).d[1:]}
    assert a.isdisjoint(b) and a | b == set(range(1, 8))


def test_code_text_round_trip():
    c = parse_code_text("# [5,2,3]\n11010\n01101\n")
    assert c.k == 2
    assert parse_code_text(format_code(c)).same_code(c)


def test_code_text_errors():
    with pytest.raises(ParseError):
        parse_code_text("1102\n")
    with pytest.raises(ParseError):
        parse_code_text("110\n01\n")


def test_binary_matrix_array_round_trip():
    arr = np.array([[1, 0, 1], [0, 1, 1]])
    m = BinaryMatrix.from_array(arr)
    assert (m.to_array() == arr).all()
    assert m.get(0, 2) == 1 and m.get(1, 0) == 0
