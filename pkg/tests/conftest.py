"""Shared reference states and random generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from entangle_lab.apf import Apf, is_lp, quadratic_form

# 5-qubit bipartite state whose C-side code is the [5,2,3] code
P5 = "x3*x0 + x0*x2 + x2*x1 + x1*x4 + x4*x0"
# 6-qubit complete bipartite state on {0,2,4} x {1,3,5}
P6 = "x0*x1 + x0*x3 + x0*x5 + x1*x2 + x1*x4 + x2*x3 + x2*x5 + x3*x4 + x4*x5"
# 5-qubit non-bipartite state with PAR_l = 8
P5_NB = "x0*x1 + x0*x2 + x0*x3 + x0*x4 + x1*x2 + x1*x4 + x2*x3 + x3*x4"


def bipolar_vector(edges, n: int) -> np.ndarray:
    """Independent +/-1 evaluation of (-1)^{sum x_a x_b}, qubit i = bit 2^i."""
    idx = np.arange(1 << n)
    p = np.zeros(1 << n, dtype=np.int64)
    for a, b in edges:
        p ^= ((idx >> a) & 1) & ((idx >> b) & 1)
    return 1 - 2 * p


def random_lp(rng: np.random.Generator, n: int, density: float = 0.5) -> Apf:
    """Random bipartite quadratic phase state with no isolated qubit."""
    while True:
        side = rng.integers(0, 2, n)
        if side.all() or not side.any():
            continue
        edges = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if side[i] != side[j] and rng.random() < density
        ]
        a = quadratic_form(edges, n)
        if edges and is_lp(a) is not None:
            return a


@pytest.fixture
def s5() -> Apf:
    return Apf.bipolar(P5)


@pytest.fixture
def s6() -> Apf:
    return Apf.bipolar(P6)


# acceptance criteria register (number, ok, detail) here; printed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {num:>2}: {detail}")
