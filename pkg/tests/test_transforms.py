import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import bipolar_vector, random_lp
from entangle_lab.apf import expand
from entangle_lab.errors import DimensionTooLarge, ParseError
from entangle_lab.gf2 import LinearCode
from entangle_lab.state import StateVector, indicator_from_code, par
from entangle_lab.transforms import (
    H,
    NH,
    apply_gate,
    apply_gate_string,
    apply_h,
    gates_to_mask,
    generic,
    hi_multispectra,
    mask_to_gates,
    nega_hadamard_ghz,
    phase_w,
    wht,
)

ints = st.lists(st.integers(-4, 4), min_size=8, max_size=8).filter(any)


def dense(n, q, u):
    # qubit q is bit 2^q, so it is the (n-1-q)-th Kronecker factor
    out = np.eye(1)
    for pos in reversed(range(n)):
        out = np.kron(out, u if pos == q else np.eye(2))
    return out


@settings(max_examples=50)
@given(ints, st.integers(0, 2), st.sampled_from(["H", "NH", "PW"]))
def test_exact_gates_match_dense(vals, q, kind):
    g = {"H": H, "NH": NH, "PW": phase_w(3, 5)}[kind]
    s = StateVector.from_ints(vals)
    got = apply_gate(s, q, g).to_complex()
    want = dense(3, q, g.matrix) @ np.array(vals, dtype=complex)
    assert np.allclose(got, want)


@given(ints, st.integers(0, 2), st.floats(0, 3), st.floats(0, 6))
def test_generic_gate_is_unitary_and_matches(vals, q, th, ph):
    g = generic(th, ph)
    u = g.matrix
    assert np.allclose(u.conj().T @ u, np.eye(2))
    s = StateVector.from_ints(vals)
    out = apply_gate(s, q, g)
    assert not out.exact
    assert np.allclose(out.to_complex(), dense(3, q, u) @ s.to_complex())


def test_gate_string_order():
    s = StateVector.from_ints([1, 0, 0, 0])
    t = apply_gate_string(s, "HI")  # H on qubit 0 only
    assert list(t.amps[0]) == [1, 1, 0, 0]
    assert gates_to_mask("IIHHH") == 0b11100
    assert mask_to_gates(0b11100, 5) == "IIHHH"
    with pytest.raises(ParseError):
        gates_to_mask("IXH")


def test_duality_example():
    c = LinearCode.from_strings(["110", "011"])
    w = wht(indicator_from_code(c))
    assert w.proportional_to(StateVector.from_ints([1, 0, 0, 0, 0, 0, 0, 1]))


@given(ints)
def test_wht_equals_all_h_and_is_involution(vals):
    s = StateVector.from_ints(vals)
    w = wht(s)
    assert w.same_as(apply_h(s, range(3)))
    assert wht(w).same_as(s)
    assert np.allclose(wht(s.to_float()).to_complex(), w.to_complex())


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=16, max_size=16).filter(any))
def test_multispectra_matches_direct(vals):
    s = StateVector.from_ints(vals)
    t = hi_multispectra(s)
    for mask in range(16):
        assert t[mask] == par(apply_h(s, [q for q in range(4) if mask >> q & 1]))


def test_multispectra_complex_exact():
    s = apply_gate(StateVector.from_ints([1, 0, 0, 0, 0, 0, 0, 1]), 1, NH)
    t = hi_multispectra(s)
    for mask in range(8):
        assert t[mask] == par(apply_h(s, [q for q in range(3) if mask >> q & 1]))


def test_multispectra_threads_agree():
    rng = np.random.default_rng(3)
    a = random_lp(rng, 9)
    s = expand(a)
    assert hi_multispectra(s, threads=4).entries == hi_multispectra(s, threads=1).entries


def test_multispectra_float_close():
    s = StateVector.from_ints(bipolar_vector([(0, 1), (1, 2)], 3))
    te, tf = hi_multispectra(s), hi_multispectra(s.to_float())
    for m in te.entries:
        assert abs(float(te[m]) - tf[m]) < 1e-9


def test_max_entry_tie_break():
    s = StateVector.from_ints(bipolar_vector([(0, 1)], 2))
    mask, best = hi_multispectra(s).max_entry()
    assert best == 2 and mask == 0b01


def test_multispectra_guard():
    with pytest.raises(DimensionTooLarge):
        hi_multispectra(StateVector.from_ints([1] * (1 << 14)))


def test_lp_ratio_half_or_two():
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        t = hi_multispectra(expand(random_lp(rng, n)))
        for mask, v in t.entries.items():
            for q in range(n):
                assert t[mask ^ (1 << q)] / v in (2, 0.5)


def test_quadratic_spectra_three_valued():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
        t = hi_multispectra(StateVector.from_ints(bipolar_vector(edges, n)), keep_spectra_below=n + 1)
        for spectrum in t.spectra.values():
            assert len(np.unique(spectrum.real_ints())) <= 3


@pytest.mark.parametrize("n", range(2, 9))
def test_negahadamard_maps_complete_graph_to_ghz(n):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    g = nega_hadamard_ghz(StateVector.from_ints(bipolar_vector(edges, n)), 0)
    assert g.exact
    assert list(np.flatnonzero(g.nonzero())) == [0, (1 << n) - 1]
