"""Amplitude vectors with exact cyclotomic or float entries.

An exact amplitude is a + b*w + c*w^2 + d*w^3 with w = exp(i*pi/4); a state
stores the four integer components as an int64 array of shape (4, 2**n) plus
an integer ``scale_exp`` q meaning a global factor 2**(-q/2).  Float states
hold a complex128 vector.  Qubit i is bit 2**i of the index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionTooLarge, ParseError, PreconditionError
from .gf2 import LinearCode, enumerate_codewords

__all__ = [
    "StateVector",
    "Factorization",
    "cyc_mul",
    "cyc_conj",
    "cyc_omega",
    "cyc_to_complex",
    "cyc_norm2",
    "indicator_from_code",
    "par",
    "energy",
    "measure",
    "classify_measurement",
    "tensor_factorize",
    "entanglement_order",
    "support_size",
    "parse_state_text",
    "format_state",
]

MAX_INDICATOR_N = 24
MAX_FACTOR_N = 14
FLOAT_TOL = 1e-9

_OMEGA = np.exp(1j * np.pi / 4)
_OMEGA_POW = np.array([_OMEGA**k for k in range(4)])
_SQRT2 = math.sqrt(2.0)


# -- cyclotomic helpers (arrays of shape (4, ...)) --------------------------

def cyc_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product in Z[w], using w^4 = -1."""
    out = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=np.int64)
    for i in range(4):
        for j in range(4):
            k = i + j
            if k < 4:
                out[k] += x[i] * y[j]
            else:
                out[k - 4] -= x[i] * y[j]
    return out


def cyc_omega(x: np.ndarray, power: int) -> np.ndarray:
    """Multiply by w**power."""
    out = x
    for _ in range(power % 8):
        out = np.stack([-out[3], out[0], out[1], out[2]])
    return out


def cyc_conj(x: np.ndarray) -> np.ndarray:
    return np.stack([x[0], -x[3], -x[2], -x[1]])


def cyc_to_complex(x: np.ndarray) -> np.ndarray:
    return np.tensordot(_OMEGA_POW, x.astype(np.float64), axes=(0, 0))


def cyc_norm2(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """|z|^2 = r + s*sqrt(2), returned as the integer arrays (r, s)."""
    a, b, c, d = x
    r = a * a + b * b + c * c + d * d
    s = a * b + b * c + c * d - a * d
    return r, s


def _isum(v: np.ndarray) -> int:
    return int(np.sum(v.astype(object))) if v.size and np.abs(v).max() > 2**30 else int(np.sum(v))


# -- state vectors -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amps: np.ndarray
    scale_exp: int = 0

    def __post_init__(self):
        size = 1 << self.n
        if self.amps.dtype == np.int64:
            if self.amps.shape != (4, size):
                raise ValueError(f"exact amplitudes must have shape (4, {size})")
        elif self.amps.dtype == np.complex128:
            if self.amps.shape != (size,):
                raise ValueError(f"float amplitudes must have shape ({size},)")
        else:
            raise TypeError("amplitudes must be int64 (exact) or complex128 (float)")
        if not self.amps.any():
            raise PreconditionError("the all-zero vector is not a state")
        self.amps.setflags(write=False)

    # constructors
    @classmethod
    def from_ints(cls, values: Iterable[int], scale_exp: int = 0) -> "StateVector":
        v = np.asarray(list(values), dtype=np.int64)
        n = _log2_len(len(v))
        amps = np.zeros((4, len(v)), dtype=np.int64)
        amps[0] = v
        return cls(n, amps, scale_exp)

    @classmethod
    def from_cyclotomic(cls, comps, scale_exp: int = 0) -> "StateVector":
        """``comps`` has one (a, b, c, d) row per basis index."""
        arr = np.asarray(comps, dtype=np.int64)
        n = _log2_len(arr.shape[0])
        return cls(n, np.ascontiguousarray(arr.T), scale_exp)

    @classmethod
    def from_complex(cls, values) -> "StateVector":
        v = np.asarray(values, dtype=np.complex128)
        return cls(_log2_len(len(v)), v.copy())

    @classmethod
    def from_pm_string(cls, text: str) -> "StateVector":
        table = {"+": 1, "-": -1, "0": 0, "1": 1}
        try:
            return cls.from_ints(table[ch] for ch in text.strip())
        except KeyError as exc:
            raise ParseError(f"unexpected symbol {exc.args[0]!r} in +/-/0 vector") from None

    # views
    @property
    def exact(self) -> bool:
        return self.amps.dtype == np.int64

    @property
    def size(self) -> int:
        return 1 << self.n

    def is_real_integer(self) -> bool:
        return self.exact and not self.amps[1:].any()

    def real_ints(self) -> np.ndarray:
        if not self.is_real_integer():
            raise PreconditionError("state is not a real integer vector")
        return self.amps[0]

    def to_complex(self) -> np.ndarray:
        """Amplitudes as complex numbers, including the global scale."""
        if not self.exact:
            return self.amps
        return cyc_to_complex(self.amps) * 2.0 ** (-self.scale_exp / 2)

    def normalized(self) -> np.ndarray:
        v = self.to_complex()
        return v / np.linalg.norm(v)

    def to_float(self) -> "StateVector":
        if not self.exact:
            return self
        return StateVector(self.n, np.asarray(self.to_complex(), dtype=np.complex128))

    def nonzero(self) -> np.ndarray:
        if self.exact:
            return self.amps.any(axis=0)
        v = self.amps
        return np.abs(v) > FLOAT_TOL * np.abs(v).max()

    def canonical(self) -> "StateVector":
        """Divide out common factors of 2 while the scale exponent allows."""
        if not self.exact:
            return self
        amps, q = self.amps, self.scale_exp
        while q >= 2 and not (amps & 1).any():
            amps, q = amps >> 1, q - 2
        return StateVector(self.n, amps.copy(), q) if q != self.scale_exp else self

    def same_as(self, other: "StateVector") -> bool:
        """Exact equality of the represented vectors (scale included)."""
        if self.n != other.n:
            return False
        if self.exact and other.exact:
            a, b = self.canonical(), other.canonical()
            if (a.scale_exp - b.scale_exp) % 2 == 0:
                shift = (a.scale_exp - b.scale_exp) // 2
                if shift >= 0:
                    return np.array_equal(a.amps, b.amps << shift)
                return np.array_equal(a.amps << -shift, b.amps)
            # odd difference: compare a*sqrt(2) with b, sqrt(2) = w - w^3
            if a.scale_exp < b.scale_exp:
                a, b = b, a
            shift = (a.scale_exp - b.scale_exp - 1) // 2
            root2 = np.array([0, 1, 0, -1], dtype=np.int64).reshape(4, 1)
            return np.array_equal(a.amps, cyc_mul(b.amps << shift, root2))
        return bool(np.allclose(self.to_complex(), other.to_complex(), atol=FLOAT_TOL))

    def proportional_to(self, other: "StateVector", positive: bool = True) -> bool:
        """True if self = c * other for some scalar c (c > 0 when ``positive``)."""
        if self.n != other.n:
            return False
        if self.exact and other.exact:
            x, y = self.amps, other.amps
            nz = np.flatnonzero(x.any(axis=0))
            if not np.array_equal(nz, np.flatnonzero(y.any(axis=0))):
                return False
            i = nz[0]
            xi, yi = x[:, i : i + 1], y[:, i : i + 1]
            if not np.array_equal(cyc_mul(x, yi), cyc_mul(y, xi)):
                return False
            if positive:
                ratio = cyc_mul(xi, cyc_conj(yi))[:, 0]
                val = complex(cyc_to_complex(ratio))
                return ratio[2] == 0 and ratio[1] == -ratio[3] and val.real > 0
            return True
        u, v = self.normalized(), other.normalized()
        i = int(np.argmax(np.abs(v)))
        if abs(v[i]) < FLOAT_TOL:
            return False
        phase = u[i] / v[i]
        if positive and not (abs(phase.imag) < 1e-7 and phase.real > 0):
            return False
        return bool(np.allclose(u, phase * v, atol=1e-7))

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"StateVector(n={self.n}, {kind}, scale_exp={self.scale_exp})"


def _log2_len(length: int) -> int:
    n = length.bit_length() - 1
    if length <= 0 or (1 << n) != length:
        raise PreconditionError(f"vector length {length} is not a power of two")
    return n


@dataclass(frozen=True)
class Factorization:
    """Finest tensor-product partition of the qubits."""

    blocks: tuple[frozenset[int], ...]

    def sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]


def indicator_from_code(c: LinearCode) -> StateVector:
    if c.n > MAX_INDICATOR_N:
        raise DimensionTooLarge(f"n={c.n} exceeds indicator guard {MAX_INDICATOR_N}")
    v = np.zeros(1 << c.n, dtype=np.int64)
    v[list(enumerate_codewords(c))] = 1
    return StateVector.from_ints(v)


def _norms(s: StateVector):
    if s.exact:
        return cyc_norm2(s.amps)
    return np.abs(s.amps) ** 2, None


def energy(s: StateVector) -> Fraction | float:
    """Sum of |s_i|^2 for the stored amplitudes (global scale excluded)."""
    r, t = _norms(s)
    if t is None:
        return float(np.sum(r))
    rr, tt = _isum(r), _isum(t)
    return Fraction(rr) if tt == 0 else rr + tt * _SQRT2


def par(s: StateVector) -> Fraction | float:
    """Peak-to-average power ratio 2^n max|s_i|^2 / sum|s_j|^2."""
    r, t = _norms(s)
    if t is None:
        return float((1 << s.n) * r.max() / r.sum())
    mags = r + t * _SQRT2
    i = int(np.argmax(mags))
    er, et = _isum(r), _isum(t)
    if t[i] == 0 and et == 0:
        return Fraction((1 << s.n) * int(r[i]), er)
    return float((1 << s.n) * mags[i] / (er + et * _SQRT2))


def support_size(s: StateVector) -> int:
    return int(np.count_nonzero(s.nonzero()))


def _split(amps: np.ndarray, n: int, qubit: int) -> np.ndarray:
    # view with the qubit as its own axis of length 2
    lead = amps.shape[:-1]
    return amps.reshape(*lead, 1 << (n - 1 - qubit), 2, 1 << qubit)


def measure(s: StateVector, qubit: int, outcome: int) -> tuple[StateVector, Fraction | float]:
    """Project ``qubit`` onto ``outcome``; returns (residual on n-1 qubits, probability)."""
    if not 0 <= qubit < s.n:
        raise PreconditionError(f"qubit {qubit} out of range for n={s.n}")
    if outcome not in (0, 1):
        raise PreconditionError("outcome must be 0 or 1")
    part = _split(s.amps, s.n, qubit)[..., outcome, :]
    lead = s.amps.shape[:-1]
    part = np.ascontiguousarray(part.reshape(*lead, -1))
    if not part.any():
        raise PreconditionError(f"outcome {outcome} on qubit {qubit} has probability zero")
    residual = StateVector(s.n - 1, part, s.scale_exp)
    e_part, e_all = energy(residual), energy(s)
    if isinstance(e_part, Fraction) and isinstance(e_all, Fraction):
        prob: Fraction | float = e_part / e_all
    else:
        prob = float(e_part) / float(e_all)
    return residual, prob


def classify_measurement(s: StateVector, qubit: int) -> str:
    """'destructive' if the support splits evenly, 'redundant' if it is untouched."""
    mask = s.nonzero()
    if s.exact:
        r, t = cyc_norm2(s.amps)
        vals = {(int(a), int(b)) for a, b in zip(r[mask], t[mask])}
    else:
        mags = np.abs(s.amps[mask])
        vals = {0} if np.allclose(mags, mags[0], rtol=1e-9) else {0, 1}
    if len(vals) != 1:
        raise PreconditionError("support magnitudes are not flat")
    halves = _split(mask, s.n, qubit)
    c0, c1 = int(halves[..., 0, :].sum()), int(halves[..., 1, :].sum())
    if c0 == 0 or c1 == 0:
        return "redundant"
    if c0 == c1:
        return "destructive"
    raise PreconditionError("support splits unevenly; not a linear-code indicator")


# -- tensor factorization ----------------------------------------------------

def _as_matrix(s: StateVector, rows: Sequence[int]) -> np.ndarray:
    """Reshape so that ``rows`` (a qubit subset) indexes matrix rows.

    Within rows and columns the lowest qubit is the least significant bit.
    """
    n = s.n
    rest = [q for q in range(n) if q not in rows]
    axes = [n - 1 - q for q in sorted(rows, reverse=True)] + [
        n - 1 - q for q in sorted(rest, reverse=True)
    ]
    if s.exact:
        t = s.amps.reshape((4,) + (2,) * n)
        t = t.transpose([0] + [a + 1 for a in axes])
        return t.reshape(4, 1 << len(rows), 1 << len(rest))
    t = s.amps.reshape((2,) * n).transpose(axes)
    return t.reshape(1 << len(rows), 1 << len(rest))


def _rank_one(m: np.ndarray, exact: bool) -> tuple[bool, int]:
    """Rank-1 test; also returns a row index holding a nonzero row."""
    if exact:
        nz = m.any(axis=0)
        i, j = np.argwhere(nz)[0]
        piv = m[:, i : i + 1, j : j + 1]
        row = m[:, i : i + 1, :]
        col = m[:, :, j : j + 1]
        if not m[1:].any():
            ok = np.array_equal(m[0] * piv[0], col[0] * row[0])
        else:
            ok = np.array_equal(cyc_mul(m, piv), cyc_mul(col, row))
        return bool(ok), int(i)
    scale = np.abs(m).max()
    i, j = np.unravel_index(int(np.argmax(np.abs(m))), m.shape)
    resid = m * m[i, j] - np.outer(m[:, j], m[i, :])
    return bool(np.abs(resid).max() <= FLOAT_TOL * scale * scale), int(i)


def _sub_state(s: StateVector, keep: Sequence[int], drop: Sequence[int]) -> StateVector:
    """State of ``keep`` after factoring off ``drop`` (assumed separable)."""
    m = _as_matrix(s, list(drop))
    if s.exact:
        i = int(np.argwhere(m.any(axis=(0, 2)))[0][0])
        return StateVector(len(keep), np.ascontiguousarray(m[:, i, :]), 0)
    i = int(np.argmax(np.abs(m).max(axis=1)))
    return StateVector(len(keep), np.ascontiguousarray(m[i, :]))


def tensor_factorize(s: StateVector) -> Factorization:
    """Finest partition of the qubits into tensor factors."""
    if s.n > MAX_FACTOR_N:
        raise DimensionTooLarge(f"n={s.n} exceeds factorization guard {MAX_FACTOR_N}")
    from itertools import combinations

    blocks: list[frozenset[int]] = []
    labels = list(range(s.n))
    cur = s
    # strip single-qubit factors first; they are the common case
    changed = True
    while changed and cur.n > 1:
        changed = False
        for pos in range(cur.n):
            ok, _ = _rank_one(_as_matrix(cur, [pos]), cur.exact)
            if ok:
                blocks.append(frozenset([labels[pos]]))
                keep = [p for p in range(cur.n) if p != pos]
                cur = _sub_state(cur, keep, [pos])
                labels = [labels[p] for p in keep]
                changed = True
                break
    while cur.n:
        found = None
        for size in range(2, cur.n):
            for extra in combinations(range(1, cur.n), size - 1):
                sub = [0, *extra]
                ok, _ = _rank_one(_as_matrix(cur, sub), cur.exact)
                if ok:
                    found = sub
                    break
            if found:
                break
        if found is None:
            found = list(range(cur.n))
        blocks.append(frozenset(labels[p] for p in found))
        keep = [p for p in range(cur.n) if p not in found]
        if not keep:
            break
        cur = _sub_state(cur, keep, found)
        labels = [labels[p] for p in keep]
    return Factorization(tuple(sorted(blocks, key=min)))


def entanglement_order(s: StateVector) -> int:
    """Largest block size; a fully factored state reports 0."""
    sizes = tensor_factorize(s).sizes()
    biggest = max(sizes, default=0)
    return 0 if biggest <= 1 else biggest


# -- text format ---------------------------------------------------------------

def parse_state_text(text: str) -> StateVector:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) == 1 and set(lines[0]) <= set("+-0"):
        return StateVector.from_pm_string(lines[0])
    if not lines or not lines[0].startswith("n="):
        raise ParseError("state file must start with 'n=<int>' or be a +/-/0 string")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise ParseError("bad qubit count line") from None
    body = lines[1:]
    scale = 0
    if body and body[0].startswith("scale="):
        try:
            scale = int(body[0][6:])
        except ValueError:
            raise ParseError("bad scale line") from None
        body = body[1:]
    if len(body) != 1 << n:
        raise ParseError(f"expected {1 << n} amplitude lines, found {len(body)}")
    fields = [ln.split() for ln in body]
    widths = {len(f) for f in fields}
    try:
        if widths == {4}:
            return StateVector.from_cyclotomic([[int(x) for x in f] for f in fields], scale)
        if widths == {2} and not scale:
            return StateVector.from_complex([complex(float(a), float(b)) for a, b in fields])
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    raise ParseError("amplitude lines must all have 4 integers or 2 floats")


def format_state(s: StateVector) -> str:
    out = [f"n={s.n}"]
    if s.exact:
        if s.scale_exp:
            out.append(f"scale={s.scale_exp}")
        out += [" ".join(str(int(x)) for x in s.amps[:, i]) for i in range(s.size)]
    else:
        out += [f"{float(z.real)!r} {float(z.imag)!r}" for z in s.amps]
    return "\n".join(out) + "\n"
