"""Single-qubit gates, the fast WHT, and HI multispectra enumeration.

Gate strings map left to right onto qubits 0..n-1, so "IIHHH" puts H on
qubits 2, 3 and 4.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import DimensionTooLarge, ParseError, PreconditionError
from .state import StateVector, cyc_omega, par

__all__ = [
    "Gate2x2",
    "H",
    "I",
    "NH",
    "phase_w",
    "generic",
    "apply_gate",
    "apply_h",
    "apply_gate_string",
    "wht",
    "MultispectraTable",
    "hi_multispectra",
    "nega_hadamard_ghz",
    "mask_to_gates",
    "gates_to_mask",
    "mask_of",
    "qubits_of",
]

MAX_MULTISPECTRA_N = 13
_INV_SQRT2 = 1 / math.sqrt(2.0)


@dataclass(frozen=True)
class Gate2x2:
    kind: str
    params: tuple = ()

    @property
    def matrix(self) -> np.ndarray:
        """Unitary matrix acting as new = U @ (old_bit0, old_bit1)."""
        if self.kind == "I":
            return np.eye(2, dtype=complex)
        if self.kind == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2
        if self.kind == "NH":
            return np.array([[1, 1j], [1, -1j]], dtype=complex) * _INV_SQRT2
        if self.kind == "PhaseW":
            w = np.exp(1j * np.pi / 4)
            p0, p1 = self.params
            return np.diag([w**p0, w**p1])
        if self.kind == "Generic":
            theta, phi = self.params
            c, s = math.cos(theta), math.sin(theta)
            return np.array(
                [[c, s * np.exp(1j * phi)], [s * np.exp(-1j * phi), -c]], dtype=complex
            )
        raise ValueError(f"unknown gate kind {self.kind!r}")


H = Gate2x2("H")
I = Gate2x2("I")
NH = Gate2x2("NH")


def phase_w(p0: int, p1: int) -> Gate2x2:
    """diag(w**p0, w**p1) with w = exp(i*pi/4)."""
    return Gate2x2("PhaseW", (p0 % 8, p1 % 8))


def generic(theta: float, phi: float) -> Gate2x2:
    return Gate2x2("Generic", (float(theta), float(phi)))


def mask_of(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def qubits_of(mask: int) -> list[int]:
    return [q for q in range(mask.bit_length()) if (mask >> q) & 1]


def mask_to_gates(mask: int, n: int) -> str:
    return "".join("H" if (mask >> q) & 1 else "I" for q in range(n))


def gates_to_mask(text: str) -> int:
    mask = 0
    for q, ch in enumerate(text.strip().upper()):
        if ch == "H":
            mask |= 1 << q
        elif ch != "I":
            raise ParseError(f"gate string may only contain H and I, got {ch!r}", q)
    return mask


def _pairs(arr: np.ndarray, n: int, qubit: int):
    lead = arr.shape[:-1]
    v = arr.reshape(*lead, 1 << (n - 1 - qubit), 2, 1 << qubit)
    return v[..., 0, :], v[..., 1, :], lead


def _join(a: np.ndarray, b: np.ndarray, lead) -> np.ndarray:
    return np.stack([a, b], axis=-2).reshape(*lead, -1)


def apply_gate(s: StateVector, qubit: int, g: Gate2x2) -> StateVector:
    if not 0 <= qubit < s.n:
        raise PreconditionError(f"qubit {qubit} out of range for n={s.n}")
    if g.kind == "I":
        return s
    if s.exact and g.kind in ("H", "NH", "PhaseW"):
        a, b, lead = _pairs(s.amps, s.n, qubit)
        if g.kind == "H":
            return StateVector(s.n, _join(a + b, a - b, lead), s.scale_exp + 1)
        if g.kind == "NH":
            ib = cyc_omega(b, 2)
            return StateVector(s.n, _join(a + ib, a - ib, lead), s.scale_exp + 1)
        p0, p1 = g.params
        return StateVector(s.n, _join(cyc_omega(a, p0), cyc_omega(b, p1), lead), s.scale_exp)
    u = g.matrix
    a, b, lead = _pairs(s.to_complex(), s.n, qubit)
    out = _join(u[0, 0] * a + u[0, 1] * b, u[1, 0] * a + u[1, 1] * b, lead)
    return StateVector(s.n, np.ascontiguousarray(out, dtype=np.complex128))


def apply_h(s: StateVector, qubits: Iterable[int]) -> StateVector:
    for q in qubits:
        s = apply_gate(s, q, H)
    return s


def apply_gate_string(s: StateVector, gates: str) -> StateVector:
    if len(gates) != s.n:
        raise PreconditionError(f"gate string length {len(gates)} differs from n={s.n}")
    return apply_h(s, qubits_of(gates_to_mask(gates)))


def wht(s: StateVector) -> StateVector:
    """H on every qubit via the in-place butterfly network."""
    arr = s.amps.copy() if s.exact else s.amps * (_INV_SQRT2**s.n)
    lead = arr.shape[:-1]
    h = 1
    size = s.size
    while h < size:
        v = arr.reshape(*lead, size // (2 * h), 2, h)
        a = v[..., 0, :].copy()
        v[..., 0, :] += v[..., 1, :]
        v[..., 1, :] = a - v[..., 1, :]
        h *= 2
    if s.exact:
        return StateVector(s.n, arr, s.scale_exp + s.n)
    return StateVector(s.n, arr)


@dataclass
class MultispectraTable:
    """PAR of (prod_{i in T} H(i)) s for every subset mask T."""

    n: int
    entries: dict[int, Fraction | float]
    spectra: dict[int, StateVector] = field(default_factory=dict)

    def __getitem__(self, mask: int) -> Fraction | float:
        return self.entries[mask]

    def at(self, gates: str) -> Fraction | float:
        return self.entries[gates_to_mask(gates)]

    def grid(self, row_qubits: list[int], col_qubits: list[int]) -> list[list]:
        """2-d view; row/column labels count in binary with the first qubit as LSB."""
        out = []
        for r in range(1 << len(row_qubits)):
            rmask = mask_of(q for i, q in enumerate(row_qubits) if (r >> i) & 1)
            row = []
            for c in range(1 << len(col_qubits)):
                cmask = mask_of(q for i, q in enumerate(col_qubits) if (c >> i) & 1)
                row.append(self.entries[rmask | cmask])
            out.append(row)
        return out

    def max_entry(self) -> tuple[int, Fraction | float]:
        best = max(self.entries.values())
        mask = min(m for m, v in self.entries.items() if v == best)
        return mask, best

    def min_entry(self) -> tuple[int, Fraction | float]:
        worst = min(self.entries.values())
        mask = min(m for m, v in self.entries.items() if v == worst)
        return mask, worst


def _par_real(v: np.ndarray, n: int) -> Fraction:
    sq = v * v
    return Fraction((1 << n) * int(sq.max()), int(sq.sum()))


def _walk(s: StateVector, walk_qubits: list[int], base_mask: int, keep_below: int | None):
    """Gray-code walk over H/I choices on ``walk_qubits`` starting from s."""
    n = s.n
    real = s.is_real_integer()
    if real:
        arr = s.amps[0].copy()
    elif s.exact:
        arr = s.amps.copy()
    else:
        arr = s.amps.copy()
    scale = s.scale_exp
    applied = 0
    out: dict[int, Fraction | float] = {}
    spectra: dict[int, StateVector] = {}

    def record(mask: int):
        if real:
            out[mask] = _par_real(arr, n)
            state = None
        else:
            state = StateVector(n, arr.copy(), scale) if s.exact else StateVector(n, arr.copy())
            out[mask] = par(state)
        if keep_below is not None and bin(mask).count("1") < keep_below:
            if state is None:
                amps = np.zeros((4, arr.size), dtype=np.int64)
                amps[0] = arr
                state = StateVector(n, amps, scale)
            spectra[mask] = state

    record(base_mask)
    for step in range(1, 1 << len(walk_qubits)):
        q = walk_qubits[(step & -step).bit_length() - 1]
        bit = 1 << q
        a, b, lead = _pairs(arr, n, q)
        if s.exact:
            if applied & bit:
                # H twice is 2*I on the integer butterfly, so halve exactly
                arr = _join((a + b) >> 1, (a - b) >> 1, lead)
                scale -= 1
            else:
                arr = _join(a + b, a - b, lead)
                scale += 1
        else:
            arr = _join((a + b) * _INV_SQRT2, (a - b) * _INV_SQRT2, lead)
        applied ^= bit
        record(base_mask ^ applied)
    return out, spectra


def hi_multispectra(
    s: StateVector, threads: int = 1, keep_spectra_below: int | None = None
) -> MultispectraTable:
    """PAR for all 2^n H/I patterns via Gray-code single-gate updates.

    With threads > 1 the subset lattice is split on the top qubits and the
    resulting sub-walks run concurrently.
    """
    if s.n > MAX_MULTISPECTRA_N:
        raise DimensionTooLarge(f"n={s.n} exceeds multispectra guard {MAX_MULTISPECTRA_N}")
    n = s.n
    p = 0
    if threads > 1 and n > 4:
        p = min(int(math.log2(threads)), n - 4)
    fixed = list(range(n - p, n))
    walk_qubits = list(range(n - p))

    def job(prefix: int):
        base = 0
        t = s
        for i, q in enumerate(fixed):
            if (prefix >> i) & 1:
                t = apply_gate(t, q, H)
                base |= 1 << q
        return _walk(t, walk_qubits, base, keep_spectra_below)

    prefixes = range(1 << p)
    if p:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, prefixes))
    else:
        results = [job(0)]
    entries: dict[int, Fraction | float] = {}
    spectra: dict[int, StateVector] = {}
    for e, sp in results:
        entries.update(e)
        spectra.update(sp)
    return MultispectraTable(n, dict(sorted(entries.items())), spectra)


def nega_hadamard_ghz(s: StateVector, phase_qubit: int) -> StateVector:
    """NH on every qubit followed by diag(w^7, w) on ``phase_qubit``."""
    for q in range(s.n):
        s = apply_gate(s, q, NH)
    return apply_gate(s, phase_qubit, phase_w(7, 1))
