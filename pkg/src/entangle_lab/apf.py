"""Boolean polynomials (ANF) and polar forms s(x) = prod_k h_k(x) * (-1)^p(x).

Covers parsing and printing, expansion to vectors, the closed-form symbolic
H(i) rewrites, bipartite quadratic detection, connection matrices, PAR by
rank, and reduction of bipartite quadratic states to code indicators.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import DimensionTooLarge, ParseError, PreconditionError, UnsupportedCase
from .gf2 import BinaryMatrix, LinearCode, rank, rref
from .state import StateVector
from .transforms import MultispectraTable, apply_h

__all__ = [
    "Anf",
    "Apf",
    "BipartiteSplit",
    "ConnectionMatrix",
    "AlephResult",
    "parse_anf",
    "print_anf",
    "parse_apf",
    "print_apf",
    "expand",
    "apply_h_symbolic",
    "is_lp",
    "connection_matrix",
    "fast_par_by_rank",
    "rank_multispectra",
    "reduce_apf",
    "reduce_to_indicator",
    "code_to_lp",
    "aleph_reduce_numeric",
    "quadratic_form",
]

MAX_EXPAND_N = 20


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class Anf:
    """Polynomial over GF(2); each monomial is a bitmask of variables (0 = constant 1)."""

    n: int
    monomials: frozenset[int]

    @classmethod
    def zero(cls, n: int) -> "Anf":
        return cls(n, frozenset())

    @classmethod
    def one(cls, n: int) -> "Anf":
        return cls(n, frozenset([0]))

    @classmethod
    def var(cls, i: int, n: int) -> "Anf":
        return cls(n, frozenset([1 << i]))

    @classmethod
    def from_monomials(cls, n: int, monos: Iterable[int]) -> "Anf":
        acc: set[int] = set()
        for m in monos:
            acc ^= {m}
        return cls(n, frozenset(acc))

    def _n(self, other: "Anf") -> int:
        return max(self.n, other.n)

    def __add__(self, other: "Anf | int") -> "Anf":
        if isinstance(other, int):
            other = Anf.one(self.n) if other & 1 else Anf.zero(self.n)
        return Anf(self._n(other), self.monomials ^ other.monomials)

    __radd__ = __add__

    def __mul__(self, other: "Anf") -> "Anf":
        acc: set[int] = set()
        for a in self.monomials:
            for b in other.monomials:
                acc ^= {a | b}
        return Anf(self._n(other), frozenset(acc))

    def is_zero(self) -> bool:
        return not self.monomials

    def is_one(self) -> bool:
        return self.monomials == frozenset([0])

    @property
    def degree(self) -> int:
        return max((_popcount(m) for m in self.monomials), default=0)

    @property
    def support_vars(self) -> int:
        acc = 0
        for m in self.monomials:
            acc |= m
        return acc

    def contains(self, i: int) -> bool:
        return any((m >> i) & 1 for m in self.monomials)

    def restrict(self, i: int, value: int) -> "Anf":
        """Substitute x_i = value."""
        bit = 1 << i
        if value:
            return Anf.from_monomials(self.n, (m & ~bit for m in self.monomials))
        return Anf(self.n, frozenset(m for m in self.monomials if not m & bit))

    def evaluate(self, n: int | None = None) -> np.ndarray:
        """Truth table of length 2^n (index bit i = x_i)."""
        n = self.n if n is None else n
        idx = np.arange(1 << n, dtype=np.int64)
        out = np.zeros(1 << n, dtype=np.uint8)
        for m in self.monomials:
            out ^= ((idx & m) == m).astype(np.uint8)
        return out

    def __str__(self) -> str:
        return print_anf(self)


def _sort_key(m: int):
    vs = [i for i in range(m.bit_length()) if (m >> i) & 1]
    return (0, vs) if vs else (1, [])


def print_anf(a: Anf) -> str:
    if not a.monomials:
        return "0"
    terms = []
    for m in sorted(a.monomials, key=_sort_key):
        if m == 0:
            terms.append("1")
        else:
            terms.append("*".join(f"x{i}" for i in range(m.bit_length()) if (m >> i) & 1))
    return " + ".join(terms)


_TOKEN = re.compile(r"\s*(?:(x)(\d+)|(1)|(0)|(\+)|(\*))")


def parse_anf(text: str, n: int | None = None) -> Anf:
    """Parse 'x0*x1 + x2 + 1'; '*' between variables may be omitted."""
    monos: list[int] = []
    cur: int | None = None
    pos = 0
    expect_factor = True
    text_len = len(text.rstrip())
    while pos < text_len:
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start() + len(m.group(0)) - len(m.group(0).lstrip())
        if m.group(1):
            cur = (cur or 0) | (1 << int(m.group(2)))
            expect_factor = False
        elif m.group(3) or m.group(4):
            if cur is not None and not expect_factor:
                raise ParseError("constant must stand alone in a term", start)
            cur = 0 if m.group(3) else -1
            expect_factor = False
        elif m.group(5):
            if expect_factor:
                raise ParseError("missing term before '+'", start)
            if cur != -1:
                monos.append(cur)
            cur, expect_factor = None, True
        else:
            if expect_factor or cur is None or cur <= 0:
                raise ParseError("'*' must join variables", start)
            expect_factor = True
        pos = m.end()
    if expect_factor:
        raise ParseError("expression ends unexpectedly", pos)
    if cur != -1:
        monos.append(cur)
    width = max((mm.bit_length() for mm in monos), default=0)
    if n is None:
        n = max(width, 1)
    elif width > n:
        raise ParseError(f"variable index exceeds n={n}")
    return Anf.from_monomials(n, monos)


@dataclass(frozen=True)
class Apf:
    """s(x) = prod(factors) * (-1)^phase."""

    n: int
    factors: tuple[Anf, ...]
    phase: Anf

    @classmethod
    def bipolar(cls, phase: Anf | str, n: int | None = None) -> "Apf":
        if isinstance(phase, str):
            phase = parse_anf(phase, n)
        n = phase.n if n is None else n
        return cls(n, (), Anf(n, phase.monomials))

    def magnitude(self) -> Anf:
        m = Anf.one(self.n)
        for h in self.factors:
            m = m * h
        return m

    def __str__(self) -> str:
        return print_apf(self)


def print_apf(a: Apf) -> str:
    return "".join(f"({print_anf(h)})" for h in a.factors) + f"(-1)^({print_anf(a.phase)})"


def parse_apf(text: str, n: int | None = None) -> Apf:
    """Parse '(h_1)(h_2)...(-1)^(p)'; the phase part is optional."""
    groups: list[tuple[int, str]] = []
    phase_text = "0"
    pos = 0
    body = text.strip()
    while pos < len(body):
        if body[pos].isspace() or body[pos] == "*":
            pos += 1
            continue
        if body.startswith("(-1)^", pos):
            pos += 5
            if pos >= len(body) or body[pos] != "(":
                raise ParseError("phase must be parenthesised", pos)
            end = body.find(")", pos)
            if end < 0:
                raise ParseError("unbalanced parenthesis", pos)
            phase_text = body[pos + 1 : end]
            pos = end + 1
            continue
        if body[pos] != "(":
            raise ParseError("expected '('", pos)
        end = body.find(")", pos)
        if end < 0:
            raise ParseError("unbalanced parenthesis", pos)
        groups.append((pos + 1, body[pos + 1 : end]))
        pos = end + 1
    parsed = []
    for offset, g in groups:
        try:
            parsed.append(parse_anf(g))
        except ParseError as exc:
            raise ParseError(f"in factor: {exc}", offset) from None
    phase = parse_anf(phase_text)
    width = max([a.support_vars.bit_length() for a in parsed + [phase]] + [1])
    n = width if n is None else n
    if width > n:
        raise ParseError(f"variable index exceeds n={n}")
    return Apf(n, tuple(Anf(n, h.monomials) for h in parsed), Anf(n, phase.monomials))


def expand(a: Apf) -> StateVector:
    """Evaluate at all 2^n points; entries lie in {-1, 0, 1}."""
    if a.n > MAX_EXPAND_N:
        raise DimensionTooLarge(f"n={a.n} exceeds expansion guard {MAX_EXPAND_N}")
    mag = np.ones(1 << a.n, dtype=np.int64)
    for h in a.factors:
        mag &= h.evaluate(a.n)
    sign = 1 - 2 * a.phase.evaluate(a.n).astype(np.int64)
    return StateVector.from_ints(mag * sign)


def _clean(factors: Iterable[Anf]) -> tuple[Anf, ...]:
    out = []
    for h in factors:
        if h.is_one():
            continue
        if h.is_zero():
            raise UnsupportedCase("rewrite produced a zero magnitude factor")
        if h not in out:
            out.append(h)
    return tuple(out)


def apply_h_symbolic(a: Apf, qubit: int) -> Apf:
    """Symbolic H on one qubit using the closed-form rewrites.

    Three branches: no magnitude factor involves x_i; every factor involving
    x_i has the form x_i + g; or the cofactors v|x_i=0 and v|x_i=1 of the
    involved factors are disjoint.  Anything else raises UnsupportedCase.
    """
    n = a.n
    if not 0 <= qubit < n:
        raise PreconditionError(f"qubit {qubit} out of range for n={n}")
    xi = Anf.var(qubit, n)
    p0 = a.phase.restrict(qubit, 0)
    c = a.phase.restrict(qubit, 1) + p0
    involved = [h for h in a.factors if h.contains(qubit)]
    rest = [h for h in a.factors if not h.contains(qubit)]

    if not involved:
        return Apf(n, _clean(rest + [c + xi + 1]), p0)

    lows = [h.restrict(qubit, 0) for h in involved]
    highs = [h.restrict(qubit, 1) for h in involved]
    if all((hi + lo).is_one() for hi, lo in zip(highs, lows)):
        # each involved factor is x_i + h0_k; pivot on the first one
        h0z = lows[0]
        new = [h0z + lo + 1 for lo in lows[1:]]
        phase = p0 + (h0z + 1) * (c + xi)
        return Apf(n, _clean(rest + new), phase)

    v0 = Anf.one(n)
    v1 = Anf.one(n)
    for lo, hi in zip(lows, highs):
        v0 = v0 * lo
        v1 = v1 * hi
    if (v0 * v1).is_zero():
        return Apf(n, _clean(rest + [v0 + v1]), p0 + v1 * (c + xi))
    raise UnsupportedCase(
        f"H({qubit}) needs the general rewrite; use the numeric engine instead"
    )


@dataclass(frozen=True)
class BipartiteSplit:
    t_c: frozenset[int]
    t_cperp: frozenset[int]

    def __post_init__(self):
        if self.t_c & self.t_cperp:
            raise PreconditionError("split sides overlap")

    @classmethod
    def of(cls, t_c: Iterable[int], t_cperp: Iterable[int]) -> "BipartiteSplit":
        return cls(frozenset(t_c), frozenset(t_cperp))

    def swapped(self) -> "BipartiteSplit":
        return BipartiteSplit(self.t_cperp, self.t_c)

    def side(self, name: str) -> frozenset[int]:
        key = name.strip().lower().replace("⊥", "perp")
        if key == "c":
            return self.t_c
        if key in ("cperp", "c_perp", "perp"):
            return self.t_cperp
        raise PreconditionError(f"unknown side {name!r}; use C or Cperp")


def quadratic_form(edges: Iterable[tuple[int, int]], n: int) -> Apf:
    """Phase-only state (-1)^{sum x_a x_b} over the given edges."""
    return Apf(n, (), Anf.from_monomials(n, ((1 << a) | (1 << b) for a, b in edges)))


def _edges(a: Apf) -> list[tuple[int, int]]:
    out = []
    for m in a.phase.monomials:
        vs = [i for i in range(m.bit_length()) if (m >> i) & 1]
        out.append((vs[0], vs[1]))
    return out


def is_lp(a: Apf) -> BipartiteSplit | None:
    """Bipartite split if ``a`` is a phase-only bipartite quadratic; else None.

    Per connected component the side holding the smallest vertex is T_Cperp.
    """
    if a.factors or not a.phase.monomials:
        return None
    if any(_popcount(m) != 2 for m in a.phase.monomials):
        return None
    if a.phase.support_vars != (1 << a.n) - 1:
        return None
    adj: dict[int, list[int]] = {i: [] for i in range(a.n)}
    for u, v in _edges(a):
        adj[u].append(v)
        adj[v].append(u)
    colour: dict[int, int] = {}
    for root in range(a.n):
        if root in colour:
            continue
        colour[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in colour:
                    colour[v] = 1 - colour[u]
                    queue.append(v)
                elif colour[v] == colour[u]:
                    return None
    return BipartiteSplit.of(
        (v for v, col in colour.items() if col == 0),
        (v for v, col in colour.items() if col == 1),
    )


def _require_split(a: Apf, split: BipartiteSplit | None) -> BipartiteSplit:
    canon = is_lp(a)
    if canon is None:
        raise PreconditionError("state is not a bipartite quadratic phase state")
    if split is None:
        return canon
    if split.t_c | split.t_cperp != frozenset(range(a.n)):
        raise PreconditionError("split does not cover every qubit")
    for u, v in _edges(a):
        if (u in split.t_c) == (v in split.t_c):
            raise PreconditionError(f"edge x{u}x{v} lies within one side of the split")
    return split


@dataclass(frozen=True)
class ConnectionMatrix:
    m: BinaryMatrix
    rows: tuple[int, ...]  # qubits of T_Cperp
    cols: tuple[int, ...]  # qubits of T_C


def connection_matrix(a: Apf, split: BipartiteSplit | None = None) -> ConnectionMatrix:
    split = _require_split(a, split)
    rows = tuple(sorted(split.t_cperp))
    cols = tuple(sorted(split.t_c))
    col_pos = {q: j for j, q in enumerate(cols)}
    packed = {r: 0 for r in rows}
    for u, v in _edges(a):
        r, c = (u, v) if u in split.t_cperp else (v, u)
        packed[r] |= 1 << col_pos[c]
    return ConnectionMatrix(BinaryMatrix(tuple(packed[r] for r in rows), len(cols)), rows, cols)


def fast_par_by_rank(
    a: Apf,
    split: BipartiteSplit | None,
    t_sub_perp: Iterable[int],
    t_sub: Iterable[int],
    cm: ConnectionMatrix | None = None,
) -> Fraction:
    """PAR after H on t_sub_perp | t_sub, as 2^(h + h_perp - 2 rank(M_t))."""
    split = _require_split(a, split) if cm is None else split
    if cm is None:
        cm = connection_matrix(a, split)
    tp, tc = sorted(set(t_sub_perp)), sorted(set(t_sub))
    if not set(tp) <= set(cm.rows) or not set(tc) <= set(cm.cols):
        raise PreconditionError("subsets must lie on their respective sides")
    row_pos = {q: i for i, q in enumerate(cm.rows)}
    col_pos = {q: j for j, q in enumerate(cm.cols)}
    sub = cm.m.submatrix([row_pos[q] for q in tp], [col_pos[q] for q in tc])
    return Fraction(2) ** (len(tp) + len(tc) - 2 * rank(sub))


def rank_multispectra(
    a: Apf, split: BipartiteSplit | None = None, relative_mask: int = 0
) -> MultispectraTable:
    """Whole HI multispectra from ranks alone.

    Entry Q is the PAR after H on Q applied to (prod_{i in relative_mask} H(i)) s.
    """
    split = _require_split(a, split)
    cm = connection_matrix(a, split)
    entries = {}
    for q in range(1 << a.n):
        t = q ^ relative_mask
        tp = [i for i in cm.rows if (t >> i) & 1]
        tc = [i for i in cm.cols if (t >> i) & 1]
        entries[q] = fast_par_by_rank(a, split, tp, tc, cm)
    return MultispectraTable(a.n, entries)


def reduce_apf(a: Apf, side: str = "C", split: BipartiteSplit | None = None) -> Apf:
    """Symbolic H over every qubit of one side; leaves a phase-free product."""
    split = _require_split(a, split)
    out = a
    for q in sorted(split.side(side)):
        out = apply_h_symbolic(out, q)
    if not out.phase.is_zero():
        raise PreconditionError("reduction left a residual phase")
    return out


def reduce_to_indicator(
    a: Apf, side: str = "C", split: BipartiteSplit | None = None
) -> LinearCode:
    """Code whose indicator is H over one side of a bipartite quadratic state."""
    red = reduce_apf(a, side, split)
    checks = []
    for h in red.factors:
        if h.degree != 1 or 0 not in h.monomials:
            raise PreconditionError(f"factor {h} is not of the form L(x) + 1")
        checks.append(h.support_vars)
    return LinearCode.from_parity_checks(checks, a.n)


def code_to_lp(c: LinearCode) -> tuple[Apf, BipartiteSplit]:
    """Bipartite quadratic state whose C side reduces to the indicator of ``c``.

    Uses the reduced-echelon information set as T_Cperp.
    """
    red, pivots = rref(c.generator.rows, c.n)
    pivot_set = set(pivots)
    edges = []
    for row, p in zip(red, pivots):
        for j in range(c.n):
            if j not in pivot_set and (row >> j) & 1:
                edges.append((p, j))
    split = BipartiteSplit.of((j for j in range(c.n) if j not in pivot_set), pivots)
    return quadratic_form(sorted(edges), c.n), split


@dataclass(frozen=True)
class AlephResult:
    state: StateVector
    is_indicator: bool


def aleph_reduce_numeric(a: Apf, split: BipartiteSplit) -> AlephResult:
    """Numeric H over T_C for a phase-only state whose every monomial has
    exactly one variable in T_C; reports whether the result is a 0/1 indicator.
    """
    if a.factors:
        raise PreconditionError("state must be phase-only")
    if split.t_c | split.t_cperp != frozenset(range(a.n)):
        raise PreconditionError("split does not cover every qubit")
    tc_mask = sum(1 << q for q in split.t_c)
    for m in a.phase.monomials:
        if _popcount(m & tc_mask) != 1:
            raise PreconditionError(f"monomial {print_anf(Anf(a.n, frozenset([m])))} "
                                    "does not have exactly one variable in T_C")
    if a.phase.support_vars != (1 << a.n) - 1:
        raise PreconditionError("every variable must appear in the phase")
    out = apply_h(expand(a), sorted(split.t_c))
    v = out.real_ints()
    nz = v[v != 0]
    return AlephResult(out, bool(np.all(nz == nz[0]) and nz[0] > 0))
