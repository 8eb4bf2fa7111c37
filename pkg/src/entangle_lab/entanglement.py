"""Entanglement measures: PAR_l / LE, weight hierarchy, measurement
trajectories and stubbornness of entanglement, and WHT-based crypto measures.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .apf import Apf, expand, is_lp, rank_multispectra
from .errors import CrossCheckError, DimensionTooLarge, PreconditionError
from .gf2 import LinearCode, WeightHierarchy
from .state import StateVector, entanglement_order, indicator_from_code, measure, par
from .transforms import (
    H,
    apply_gate,
    apply_h,
    hi_multispectra,
    mask_to_gates,
    qubits_of,
    wht,
)

__all__ = [
    "ParlResult",
    "OptimizerConfig",
    "TrajectoryStep",
    "MeasurementTrajectory",
    "CryptoProfile",
    "exact_log2",
    "par_l_optimize",
    "par_l_exact_lp",
    "product_overlap_par",
    "witness_unitaries",
    "schmidt_bound",
    "weight_hierarchy_spectral",
    "run_trajectory",
    "greedy_trajectory",
    "se_levels",
    "se_beta",
    "se_search",
    "min_disentangling_measurements",
    "nonlinear_order",
    "correlation_immunity",
    "parl_bounds",
    "crypto_profile",
]

MAX_OPT_N = 6
MAX_SPECTRAL_N = 13
MAX_SE_N = 10


def exact_log2(x: Fraction | float | int) -> int | float:
    """log2, as an int whenever x is an exact power of two."""
    if isinstance(x, (Fraction, int)):
        f = Fraction(x)
        if f > 0:
            num, den = f.numerator, f.denominator
            if num & (num - 1) == 0 and den & (den - 1) == 0:
                return num.bit_length() - den.bit_length()
    return math.log2(float(x))


# -- PAR_l ---------------------------------------------------------------------

@dataclass(frozen=True)
class ParlResult:
    par_l: Fraction | float
    le: int | float
    method: str
    # optimizer: per-qubit (theta, w); exact route: maximizing H-subset mask
    witness: object

    def __post_init__(self):
        if float(self.par_l) < 1 - 1e-9:
            raise CrossCheckError("PAR_l below 1")


@dataclass(frozen=True)
class OptimizerConfig:
    grid: int = 16
    restarts: int = 24
    top_seeds: int = 8
    max_iter: int = 400
    tol: float = 1e-13
    seed: int = 0
    threads: int = 1


def _tensor(s: StateVector) -> np.ndarray:
    # axes ordered by qubit (axis q <-> qubit q)
    v = s.normalized().reshape((2,) * s.n)
    return v.transpose(list(range(s.n))[::-1])


def _contract_except(t: np.ndarray, vecs: list[np.ndarray], skip: int) -> np.ndarray:
    out = t
    # contract from the last axis down so indices stay valid
    for q in range(len(vecs) - 1, -1, -1):
        if q == skip:
            continue
        out = np.tensordot(out, vecs[q].conj(), axes=([q], [0]))
    return out


def _overlap(t: np.ndarray, vecs: list[np.ndarray]) -> complex:
    out = t
    for q in range(len(vecs) - 1, -1, -1):
        out = np.tensordot(out, vecs[q].conj(), axes=([q], [0]))
    return complex(out)


def _ascend(t: np.ndarray, vecs: list[np.ndarray], cfg: OptimizerConfig) -> tuple[float, list]:
    """Alternating exact per-qubit maximization of |<l|s>|^2."""
    n = len(vecs)
    vecs = [v / np.linalg.norm(v) for v in vecs]
    best = abs(_overlap(t, vecs)) ** 2
    for _ in range(cfg.max_iter):
        for q in range(n):
            g = _contract_except(t, vecs, q)
            norm = np.linalg.norm(g)
            if norm > 0:
                vecs[q] = g / norm
        val = abs(_overlap(t, vecs)) ** 2
        if val - best <= cfg.tol:
            best = max(best, val)
            break
        best = val
    return best, vecs


def _grid_vec(theta: float, w: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta) * np.exp(-1j * w)])


def _grid_sweep(t: np.ndarray, vecs: list[np.ndarray], grid: int) -> list[np.ndarray]:
    """One pass choosing each qubit's (theta, w) from a grid, others fixed."""
    thetas = np.linspace(0, math.pi / 2, grid)
    ws = np.linspace(0, 2 * math.pi, grid, endpoint=False)
    cand = np.array([_grid_vec(a, b) for a in thetas for b in ws])
    vecs = list(vecs)
    for q in range(len(vecs)):
        g = _contract_except(t, vecs, q)
        scores = np.abs(cand.conj() @ g)
        vecs[q] = cand[int(np.argmax(scores))]
    return vecs


def _seeds(s: StateVector, t: np.ndarray, cfg: OptimizerConfig) -> list[list[np.ndarray]]:
    n = s.n
    seeds: list[list[np.ndarray]] = []
    # best entries of the HI multispectra as product-state seeds
    table = hi_multispectra(s.to_float() if not s.exact else s)
    ranked = sorted(table.entries.items(), key=lambda kv: (-float(kv[1]), kv[0]))
    hrows = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    for mask, _ in ranked[: cfg.top_seeds]:
        spectrum = apply_h(s.to_float(), qubits_of(mask)).amps
        idx = int(np.argmax(np.abs(spectrum)))
        vecs = []
        for q in range(n):
            b = (idx >> q) & 1
            vecs.append(hrows[b].astype(complex) if (mask >> q) & 1 else np.eye(2, dtype=complex)[b])
        seeds.append(vecs)
    rng = np.random.default_rng(cfg.seed)
    plus = np.ones(2, dtype=complex) / math.sqrt(2)
    seeds.append(_grid_sweep(t, [plus] * n, cfg.grid))
    for _ in range(cfg.restarts):
        if rng.random() < 0.5:
            start = [_grid_vec(*rng.uniform([0, 0], [math.pi / 2, 2 * math.pi])) for _ in range(n)]
            seeds.append(_grid_sweep(t, start, cfg.grid))
        else:
            z = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
            seeds.append([row for row in z])
    return seeds


def _to_angles(v: np.ndarray) -> tuple[float, float]:
    """(theta, w) whose unitary has first row proportional to conj(v)."""
    a, b = v
    theta = math.atan2(abs(b), abs(a))
    w = float(np.angle(a) - np.angle(b)) if abs(b) > 1e-15 else 0.0
    return theta, w % (2 * math.pi)


def witness_unitaries(witness: Sequence[tuple[float, float]]) -> list[np.ndarray]:
    from .transforms import generic

    return [generic(th, w).matrix for th, w in witness]


def product_overlap_par(s: StateVector, witness: Sequence[tuple[float, float]]) -> float:
    """2^n |s'_0|^2 after applying the witness unitaries (independent check)."""
    from .transforms import generic

    t = s.to_float()
    for q, (th, w) in enumerate(witness):
        t = apply_gate(t, q, generic(th, w))
    v = t.normalized()
    return float((1 << s.n) * abs(v[0]) ** 2)


def par_l_optimize(s: StateVector, cfg: OptimizerConfig | None = None) -> ParlResult:
    """Lower bound on PAR_l from seeded alternating maximization over product states."""
    cfg = cfg or OptimizerConfig()
    if s.n > MAX_OPT_N:
        raise DimensionTooLarge(f"n={s.n} exceeds optimizer guard {MAX_OPT_N}")
    t = _tensor(s)
    seeds = _seeds(s, t, cfg)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda v: _ascend(t, v, cfg), seeds))
    else:
        results = [_ascend(t, v, cfg) for v in seeds]
    best_val, best_vecs = results[0]
    for val, vecs in results[1:]:
        if val > best_val + 1e-14:
            best_val, best_vecs = val, vecs
    value = (1 << s.n) * best_val
    value = min(value, float(1 << s.n))
    witness = tuple(_to_angles(v) for v in best_vecs)
    return ParlResult(value, s.n - math.log2(value), "optimizer", witness)


def par_l_exact_lp(a: Apf) -> ParlResult:
    """PAR_l of a bipartite quadratic state: the HI multispectra maximum."""
    if is_lp(a) is None:
        raise PreconditionError("exact PAR_l needs a bipartite quadratic phase state")
    table = rank_multispectra(a)
    mask, value = table.max_entry()
    return ParlResult(value, a.n - exact_log2(value), "multispectra-exact", mask_to_gates(mask, a.n))


def schmidt_bound(c: LinearCode) -> int:
    return min(c.k, c.n - c.k)


# -- weight hierarchy -------------------------------------------------------------

def _m_q(q_size: int, mu: Fraction, n: int, k: int) -> int:
    lg = exact_log2(mu)
    twice = q_size + lg - n + k
    if not isinstance(lg, int) or twice % 2 or twice < 0:
        raise CrossCheckError(f"m_Q = {twice}/2 is not a nonnegative integer")
    return twice // 2


def weight_hierarchy_spectral(c: LinearCode, threads: int = 1) -> WeightHierarchy:
    """Weight hierarchy from the HI multispectra of the code indicator."""
    if c.n > MAX_SPECTRAL_N:
        raise DimensionTooLarge(f"n={c.n} exceeds spectral guard {MAX_SPECTRAL_N}")
    table = hi_multispectra(indicator_from_code(c), threads=threads)
    best: dict[int, tuple[int, int]] = {}
    for mask, mu in table.entries.items():
        size = bin(mask).count("1")
        j = _m_q(size, mu, c.n, c.k)
        if j > c.k:
            raise CrossCheckError("m_Q exceeds the code dimension")
        if j not in best or (size, mask) < best[j]:
            best[j] = (size, mask)
    d = tuple(best[j][0] for j in range(c.k + 1))
    return WeightHierarchy(d, tuple(best[j][1] for j in range(c.k + 1)))


# -- trajectories ------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryStep:
    q: tuple[int, ...]
    gates: str
    qubit: int | None
    action: str  # start | measure | free
    outcome: int | None
    par: Fraction | float
    m_q: int
    codewords: int
    order: int


@dataclass(frozen=True)
class MeasurementTrajectory:
    basis: str
    steps: tuple[TrajectoryStep, ...]
    beta: tuple[int, ...] = ()

    def column(self, name: str) -> list:
        return [getattr(st, name) for st in self.steps]


def _residual_support(s: StateVector) -> int:
    return int(np.count_nonzero(s.nonzero()))


def _support_log2(count: int) -> int:
    if count & (count - 1):
        raise PreconditionError(f"residual support {count} is not a power of two")
    return count.bit_length() - 1


def _is_flat_indicator(s: StateVector) -> bool:
    if not s.is_real_integer():
        return False
    v = s.amps[0]
    nz = v[v != 0]
    return bool(np.all(nz == nz[0]) and nz[0] > 0)


class _Runner:
    """Shared state for walking a trajectory on s_B = H^B s."""

    def __init__(self, s: StateVector, basis_mask: int):
        self.n = s.n
        self.sb = apply_h(s, qubits_of(basis_mask))
        self.flat = _is_flat_indicator(self.sb)
        self.k = _support_log2(_residual_support(self.sb))
        self.basis = mask_to_gates(basis_mask, s.n)
        self.residual = self.sb
        self.labels = list(range(s.n))
        self.q = set(range(s.n))
        self.steps: list[TrajectoryStep] = []

    def _record(self, qubit, action, outcome):
        q_mask = sum(1 << i for i in self.q)
        mu = par(apply_h(self.sb, sorted(self.q)))
        count = _residual_support(self.residual)
        m = _support_log2(count)
        if self.flat:
            # cross-check the direct count against the closed-form relation
            if _m_q(len(self.q), mu, self.n, self.k) != m:
                raise CrossCheckError("m_Q from PAR disagrees with the residual support")
        order = entanglement_order(self.residual) if self.residual.n else 0
        self.steps.append(
            TrajectoryStep(
                tuple(sorted(self.q)), mask_to_gates(q_mask, self.n), qubit, action,
                outcome, mu, m, count, order,
            )
        )

    def start(self):
        self._record(None, "start", None)

    def options(self, qubit: int):
        """(action, outcome, residual) for acting on an original qubit label."""
        pos = self.labels.index(qubit)
        res = []
        for outcome in (0, 1):
            try:
                r, _ = measure(self.residual, pos, outcome)
                res.append((outcome, r))
            except PreconditionError:
                pass
        action = "measure" if len(res) == 2 else "free"
        return action, res[0][0], res[0][1]

    def act(self, qubit: int, outcome: int | None = None):
        pos = self.labels.index(qubit)
        action, out, r = self.options(qubit)
        if outcome is not None and outcome != out:
            r, _ = measure(self.residual, pos, outcome)
            out = outcome
        self.residual = r
        self.labels.pop(pos)
        self.q.discard(qubit)
        self._record(qubit, action, out)


def run_trajectory(
    s: StateVector,
    basis_mask: int,
    order: Sequence[int],
    outcomes: Sequence[int] | None = None,
) -> MeasurementTrajectory:
    """Act on qubits in ``order`` in the basis H^basis_mask s.

    Each qubit is measured when both outcomes are possible and freed
    otherwise; outcomes default to 0 whenever that outcome can occur.
    """
    if sorted(order) != sorted(set(order)) or any(not 0 <= q < s.n for q in order):
        raise PreconditionError("order must list distinct qubits")
    run = _Runner(s, basis_mask)
    run.start()
    for i, q in enumerate(order):
        run.act(q, None if outcomes is None else outcomes[i])
    return MeasurementTrajectory(run.basis, tuple(run.steps))


def greedy_trajectory(s: StateVector, basis_mask: int) -> MeasurementTrajectory:
    """Free qubits first; otherwise measure the qubit leaving the lowest order."""
    run = _Runner(s, basis_mask)
    run.start()
    while run.labels:
        frees = [q for q in run.labels if run.options(q)[0] == "free"]
        if frees:
            run.act(min(frees))
            continue
        scored = []
        for q in run.labels:
            _, _, r = run.options(q)
            scored.append((entanglement_order(r) if r.n else 0, q))
        run.act(min(scored)[1])
    return MeasurementTrajectory(run.basis, tuple(run.steps))


def _measure_set(s: StateVector, qubits: Sequence[int], hmask: int) -> StateVector:
    """Measure ``qubits`` (ascending) with H first where hmask says, outcome 0 if possible."""
    cur = s
    for q in qubits:
        if (hmask >> q) & 1:
            cur = apply_gate(cur, q, H)
    for q in sorted(qubits, reverse=True):
        try:
            cur, _ = measure(cur, q, 0)
        except PreconditionError:
            cur, _ = measure(cur, q, 1)
    return cur


def se_levels(s: StateVector, threads: int = 1, max_level: int | None = None) -> list[int]:
    """Smallest order reachable with 0, 1, 2, ... HI-basis measurements, each
    level minimized independently; stops at the first level reaching 0.
    """
    n = s.n
    levels = [entanglement_order(s)]
    top = n if max_level is None else max_level
    for m in range(1, top + 1):
        if levels[-1] == 0:
            break
        jobs = [
            (S, sum(1 << q for i, q in enumerate(S) if (hm >> i) & 1))
            for S in combinations(range(n), m)
            for hm in range(1 << m)
        ]
        levels.append(min(_score_jobs(s, jobs, threads)))
    return levels


def _score_jobs(s: StateVector, jobs, threads: int) -> list[int]:
    def score(job):
        S, mask = job
        r = _measure_set(s, S, mask)
        return entanglement_order(r) if r.n else 0

    if threads > 1 and len(jobs) > 64:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(score, jobs))
    return [score(job) for job in jobs]


def se_beta(s: StateVector, threads: int = 1) -> tuple[int, ...]:
    """beta_0..beta_k' along series of k' HI-basis measurements that fully
    disentangle the state, k' being the fewest that can.

    beta_{k'-m} is the smallest order left after the first m measurements of
    any such series (measurements on distinct qubits commute, so a prefix is
    any m-subset of the series).
    """
    n = s.n
    order0 = entanglement_order(s)
    if order0 == 0:
        return (0,)
    finals: list[tuple[tuple[int, ...], int]] = []
    k_prime = 0
    for m in range(1, n + 1):
        jobs = [
            (S, sum(1 << q for i, q in enumerate(S) if (hm >> i) & 1))
            for S in combinations(range(n), m)
            for hm in range(1 << m)
        ]
        scores = _score_jobs(s, jobs, threads)
        finals = [job for job, sc in zip(jobs, scores) if sc == 0]
        if finals:
            k_prime = m
            break
    best = [order0] + [n] * (k_prime - 1) + [0]
    cache: dict[tuple[tuple[int, ...], int], int] = {}
    for S, mask in finals:
        for m in range(1, k_prime):
            for P in combinations(S, m):
                pmask = mask & sum(1 << q for q in P)
                key = (P, pmask)
                if key not in cache:
                    cache[key] = _score_jobs(s, [key], 1)[0]
                best[m] = min(best[m], cache[key])
    return tuple(reversed(best))


def se_search(a: Apf, threads: int = 1) -> MeasurementTrajectory:
    """Stubbornness of entanglement of a bipartite quadratic state.

    Returns beta_0..beta_k' and a display trajectory in the basis of the
    HI multispectra maximum.
    """
    if is_lp(a) is None:
        raise PreconditionError("SE search needs a bipartite quadratic phase state")
    if a.n > MAX_SE_N:
        raise DimensionTooLarge(f"n={a.n} exceeds SE guard {MAX_SE_N}")
    s = expand(a)
    beta = se_beta(s, threads)
    if beta[0] != 0 or any(x > y for x, y in zip(beta, beta[1:])):
        raise CrossCheckError(f"beta {beta} is not nondecreasing from 0")
    best_mask, _ = rank_multispectra(a).max_entry()
    traj = greedy_trajectory(s, best_mask)
    return MeasurementTrajectory(traj.basis, traj.steps, beta)


def min_disentangling_measurements(a: Apf) -> int:
    split = is_lp(a)
    if split is None:
        raise PreconditionError("needs a bipartite quadratic phase state")
    le = par_l_exact_lp(a).le
    k = a.n - len(split.t_c)
    if not isinstance(le, int) or le > min(k, a.n - k):
        raise CrossCheckError(f"LE={le} exceeds min(k, n-k)={min(k, a.n - k)}")
    return le


# -- crypto measures --------------------------------------------------------------

@dataclass(frozen=True)
class CryptoProfile:
    nonlinear_order: int | float
    ci_order: int
    parl_log2_bounds: tuple


def _require_bipolar(s: StateVector) -> np.ndarray:
    if not s.is_real_integer() or not np.all(np.abs(s.amps[0]) == 1):
        raise PreconditionError("expected a +/-1 vector")
    return s.amps[0]


def nonlinear_order(s: StateVector) -> int | float:
    _require_bipolar(s)
    return s.n - exact_log2(par(wht(s)))


def correlation_immunity(s: StateVector) -> int:
    """Largest t with the WHT zero on every index of weight 1..t."""
    _require_bipolar(s)
    spectrum = wht(s).amps[0]
    weights = np.array([bin(i).count("1") for i in range(s.size)])
    t = 0
    for w in range(1, s.n + 1):
        if spectrum[weights == w].any():
            break
        t = w
    return t


def parl_bounds(s: StateVector, t: int | None = None) -> tuple:
    """[lower, upper] on log2(PAR_l) from nonlinear order and correlation immunity."""
    n = s.n
    N = nonlinear_order(s)
    if t is None:
        t = correlation_immunity(s)
    lower = Fraction(n - N) if isinstance(N, int) else n - N
    upper = n - Fraction(N) / 2 if isinstance(N, int) else n - N / 2
    if 0 <= t + 1 <= n - N:
        half = Fraction(N) / 2 if isinstance(N, int) else N / 2
        upper = max(n - t - 1 - half, lower)
    return lower, upper


def crypto_profile(s: StateVector) -> CryptoProfile:
    t = correlation_immunity(s)
    return CryptoProfile(nonlinear_order(s), t, parl_bounds(s, t))
