"""GF(2) linear algebra, binary linear codes and the brute-force weight hierarchy.

Bit convention used throughout the package: coordinate ``i`` of a word is bit
``2**i`` of its integer value, and the text form writes coordinate 0 first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionTooLarge, ParseError, PreconditionError

__all__ = [
    "BinaryMatrix",
    "LinearCode",
    "WeightHierarchy",
    "rank",
    "rref",
    "null_space",
    "dual_code",
    "enumerate_codewords",
    "weight_hierarchy_oracle",
    "word_to_str",
    "str_to_word",
    "parse_code_text",
    "read_code_file",
    "format_code",
]

MAX_ENUM_K = 20
MAX_ORACLE_K = 8


def word_to_str(word: int, n: int) -> str:
    return "".join("1" if (word >> i) & 1 else "0" for i in range(n))


def str_to_word(text: str) -> int:
    word = 0
    for i, ch in enumerate(text):
        if ch == "1":
            word |= 1 << i
        elif ch != "0":
            raise ParseError(f"invalid bit {ch!r}", i)
    return word


@dataclass(frozen=True)
class BinaryMatrix:
    """Row-major bit matrix; each row is packed into one Python int."""

    rows: tuple[int, ...]
    cols: int

    def __post_init__(self):
        limit = 1 << self.cols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits beyond the column count")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @classmethod
    def from_array(cls, arr) -> "BinaryMatrix":
        a = np.asarray(arr, dtype=np.uint8)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        if np.any(a > 1):
            raise ValueError("entries must be 0 or 1")
        rows = tuple(sum(1 << j for j, b in enumerate(row) if b) for row in a)
        return cls(rows, a.shape[1])

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "BinaryMatrix":
        if not lines:
            raise ValueError("need at least one row to infer the width")
        cols = len(lines[0])
        if any(len(s) != cols for s in lines):
            raise ParseError("rows have different lengths")
        return cls(tuple(str_to_word(s) for s in lines), cols)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.cols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.cols):
                out[i, j] = (r >> j) & 1
        return out

    def get(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def transpose(self) -> "BinaryMatrix":
        rows = []
        for j in range(self.cols):
            r = 0
            for i, row in enumerate(self.rows):
                if (row >> j) & 1:
                    r |= 1 << i
            rows.append(r)
        return BinaryMatrix(tuple(rows), self.nrows)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "BinaryMatrix":
        rows = []
        for i in row_idx:
            r = 0
            for c, j in enumerate(col_idx):
                if (self.rows[i] >> j) & 1:
                    r |= 1 << c
            rows.append(r)
        return BinaryMatrix(tuple(rows), len(col_idx))

    def __str__(self) -> str:
        return "\n".join(word_to_str(r, self.cols) for r in self.rows)


def _eliminate(rows: Iterable[int]) -> list[int]:
    # XOR basis keyed by leading (highest) bit
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return list(basis.values())


def rank(m: BinaryMatrix | Sequence[int]) -> int:
    """GF(2) rank by XOR elimination."""
    rows = m.rows if isinstance(m, BinaryMatrix) else m
    return len(_eliminate(rows))


def rref(rows: Sequence[int], cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form with pivots at the lowest coordinates first.

    Returns (nonzero rows, pivot columns), both ordered by pivot.
    """
    work = [r for r in rows]
    pivots: list[int] = []
    out: list[int] = []
    for c in range(cols):
        bit = 1 << c
        idx = next((i for i, r in enumerate(work) if r & bit), None)
        if idx is None:
            continue
        p = work.pop(idx)
        work = [r ^ p if r & bit else r for r in work]
        out = [r ^ p if r & bit else r for r in out]
        out.append(p)
        pivots.append(c)
    return out, pivots


def null_space(rows: Sequence[int], cols: int) -> list[int]:
    """Basis of {x : <r, x> = 0 for every row r}."""
    red, pivots = rref(rows, cols)
    pivot_set = set(pivots)
    basis = []
    for f in range(cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, p in zip(red, pivots):
            if (r >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


@dataclass(frozen=True)
class LinearCode:
    """Binary linear [n, k] code given by k independent generator rows."""

    n: int
    generator: BinaryMatrix

    def __post_init__(self):
        if self.generator.cols != self.n:
            raise PreconditionError("generator width differs from n")
        if rank(self.generator) != self.generator.nrows:
            raise PreconditionError("generator rows are linearly dependent")

    @property
    def k(self) -> int:
        return self.generator.nrows

    @classmethod
    def from_rows(cls, rows: Sequence[int], n: int) -> "LinearCode":
        """Build from any spanning set, keeping a reduced basis."""
        red, _ = rref(list(rows), n)
        return cls(n, BinaryMatrix(tuple(red), n))

    @classmethod
    def from_strings(cls, lines: Sequence[str], n: int | None = None) -> "LinearCode":
        if not lines:
            if n is None:
                raise ParseError("empty code needs an explicit length")
            return cls(n, BinaryMatrix((), n))
        m = BinaryMatrix.from_strings(lines)
        return cls.from_rows(m.rows, m.cols)

    @classmethod
    def from_parity_checks(cls, checks: Sequence[int], n: int) -> "LinearCode":
        return cls.from_rows(null_space(checks, n), n)

    def contains(self, word: int) -> bool:
        return rank(list(self.generator.rows) + [word]) == self.k

    def same_code(self, other: "LinearCode") -> bool:
        return (
            self.n == other.n
            and self.k == other.k
            and all(self.contains(r) for r in other.generator.rows)
        )

    def min_distance(self) -> int:
        words = enumerate_codewords(self)
        return min((bin(w).count("1") for w in words if w), default=0)


@dataclass(frozen=True)
class WeightHierarchy:
    """Generalized Hamming weights d_0 < d_1 < ... < d_k = n."""

    d: tuple[int, ...]
    # subset masks attaining each d_j, when the producing method tracks them
    witnesses: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.d or self.d[0] != 0:
            raise ValueError("d_0 must be 0")
        if any(a >= b for a, b in zip(self.d, self.d[1:])):
            raise ValueError("weight hierarchy must be strictly increasing")


def dual_code(c: LinearCode) -> LinearCode:
    return LinearCode.from_rows(null_space(c.generator.rows, c.n), c.n)


def _span_table(rows: Sequence[int]) -> list[int]:
    # codeword for every message integer, built by Gray-style doubling
    table = [0]
    for r in rows:
        table += [w ^ r for w in table]
    return table


def enumerate_codewords(c: LinearCode) -> frozenset[int]:
    if c.k > MAX_ENUM_K:
        raise DimensionTooLarge(f"k={c.k} exceeds enumeration guard {MAX_ENUM_K}")
    return frozenset(_span_table(c.generator.rows))


def _rref_subspaces(k: int, j: int):
    """Yield each j-dim subspace of GF(2)^k once, as its RREF basis."""
    for pivots in combinations(range(k), j):
        pivot_set = set(pivots)
        # free positions of row r: columns after its pivot that are not pivots
        free = [
            [c for c in range(pivots[r] + 1, k) if c not in pivot_set] for r in range(j)
        ]
        slots = [(r, c) for r in range(j) for c in free[r]]
        for assign in range(1 << len(slots)):
            rows = [1 << p for p in pivots]
            for b, (r, c) in enumerate(slots):
                if (assign >> b) & 1:
                    rows[r] |= 1 << c
            yield rows


def weight_hierarchy_oracle(c: LinearCode) -> WeightHierarchy:
    """Brute force: minimum support over every j-dimensional subcode."""
    if c.k > MAX_ORACLE_K:
        raise DimensionTooLarge(f"k={c.k} exceeds oracle guard {MAX_ORACLE_K}")
    table = _span_table(c.generator.rows)
    d = [0]
    for j in range(1, c.k + 1):
        best = c.n + 1
        for basis in _rref_subspaces(c.k, j):
            support = 0
            for msg in basis:
                support |= table[msg]
            best = min(best, bin(support).count("1"))
        d.append(best)
    return WeightHierarchy(tuple(d))


def parse_code_text(text: str) -> LinearCode:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip().replace(" ", "")
        if line:
            lines.append(line)
    if not lines:
        raise ParseError("no generator rows found")
    return LinearCode.from_strings(lines)


def read_code_file(path: str | Path) -> LinearCode:
    return parse_code_text(Path(path).read_text())


def format_code(c: LinearCode) -> str:
    return "".join(word_to_str(r, c.n) + "\n" for r in c.generator.rows)
