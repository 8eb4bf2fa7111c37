"""Command-line entry point: convert, analyze, trajectory, selftest.

Exit codes: 0 ok, 2 parse error, 3 precondition or size guard, 4 cross-check failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .apf import (
    Apf,
    code_to_lp,
    expand,
    is_lp,
    parse_anf,
    parse_apf,
    print_anf,
    rank_multispectra,
    reduce_to_indicator,
)
from .entanglement import (
    OptimizerConfig,
    crypto_profile,
    par_l_exact_lp,
    par_l_optimize,
    run_trajectory,
    greedy_trajectory,
    se_search,
    weight_hierarchy_spectral,
)
from .errors import CrossCheckError, EntangleLabError, ParseError, PreconditionError
from .gf2 import LinearCode, format_code, read_code_file, weight_hierarchy_oracle
from .state import (
    StateVector,
    entanglement_order,
    format_state,
    indicator_from_code,
    par,
    parse_state_text,
    tensor_factorize,
)
from .transforms import gates_to_mask, hi_multispectra, mask_to_gates, wht

__all__ = ["main", "build_parser", "jsonable"]

SCHEMA = "1"


def jsonable(x):
    """Exact rationals become "p/q" strings; floats stay numbers."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def _threads(args) -> int:
    if args.threads:
        return max(1, args.threads)
    env = os.environ.get("ENTANGLE_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParseError("ENTANGLE_LAB_THREADS must be an integer") from None
    return os.cpu_count() or 1


class Input:
    """Parsed command input: a symbolic form, a code, or a raw vector."""

    def __init__(self, kind: str, text: str, n: int | None):
        self.kind = kind
        self.text = text
        self.apf: Apf | None = None
        self.code: LinearCode | None = None
        if kind == "anf":
            self.apf = Apf.bipolar(parse_anf(text, n), n)
            self.state = expand(self.apf)
        elif kind == "apf":
            self.apf = parse_apf(text, n)
            self.state = expand(self.apf)
        elif kind == "code":
            self.code = read_code_file(text)
            self.state = indicator_from_code(self.code)
        else:
            self.state = parse_state_text(Path(text).read_text())

    @property
    def n(self) -> int:
        return self.state.n

    def lp_form(self) -> Apf | None:
        """Bipartite quadratic phase form when one is known."""
        if self.apf is not None and is_lp(self.apf):
            return self.apf
        if self.code is not None:
            cand, _ = code_to_lp(self.code)
            if is_lp(cand):
                return cand
        return None

    def describe(self) -> dict:
        return {"kind": self.kind, "source": self.text}


def _load(args) -> Input:
    for kind in ("anf", "apf", "code", "vector"):
        val = getattr(args, kind, None)
        if val is not None:
            try:
                return Input(kind, val, args.n)
            except OSError as exc:
                raise ParseError(f"cannot read {val}: {exc.strerror}") from None
    raise ParseError("one of --anf, --apf, --code, --vector is required")


def _add_input(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--anf", help="phase polynomial, e.g. 'x0*x1 + x1*x2'")
    g.add_argument("--apf", help="polar form '(h1)(h2)(-1)^(p)'")
    g.add_argument("--code", help="generator file, one 0/1 row per line")
    g.add_argument("--vector", help="state file ('n=..' lines or a +/-/0 string)")
    p.add_argument("-n", type=int, default=None, help="qubit count (default: from input)")


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _compact(s: StateVector) -> str | None:
    if not s.is_real_integer() or s.scale_exp:
        return None
    v = s.amps[0]
    if not np.all(np.isin(v, (-1, 0, 1))):
        return None
    return "".join({1: "+", -1: "-", 0: "0"}[int(x)] for x in v) + "\n"


# -- convert ---------------------------------------------------------------------

def cmd_convert(args) -> int:
    inp = _load(args)
    target = args.to
    if target == "code":
        if inp.code is not None:
            text = format_code(inp.code)
        else:
            if inp.apf is None or is_lp(inp.apf) is None:
                raise PreconditionError("state is not a bipartite quadratic phase state")
            text = format_code(reduce_to_indicator(inp.apf, args.side))
    elif target == "anf":
        if inp.code is None:
            raise PreconditionError("conversion to ANF needs a code input")
        apf, split = code_to_lp(inp.code)
        text = (
            f"# C side T_C={sorted(split.t_c)} T_Cperp={sorted(split.t_cperp)}\n"
            f"{print_anf(apf.phase)}\n"
        )
    else:
        text = _compact(inp.state) or format_state(inp.state)
    _write(text, args.out)
    return 0


# -- analyze ---------------------------------------------------------------------

def _analysis(inp: Input, args, threads: int) -> dict:
    wanted = {k for k in ("multispectra", "parl", "hierarchy", "se", "crypto") if getattr(args, k)}
    if not wanted:
        wanted = {"multispectra", "parl", "hierarchy", "se", "crypto"}
    s = inp.state.to_float() if args.float else inp.state
    lp = inp.lp_form()
    rep: dict = {"schema": SCHEMA, "input": inp.describe(), "n": inp.n}
    skipped: dict[str, str] = {}
    timings: dict[str, float] = {}
    witnesses: dict = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        out = fn()
        timings[name] = round(time.perf_counter() - t0, 6)
        return out

    rep["par"] = par(s)
    try:
        fac = timed("factorize", lambda: tensor_factorize(s))
        rep["blocks"] = [sorted(b) for b in fac.blocks]
        rep["order"] = entanglement_order(s)
    except PreconditionError as exc:
        skipped["order"] = str(exc)

    code = inp.code
    if code is None and lp is not None:
        code = reduce_to_indicator(lp, "C")
    if code is not None:
        rep["code"] = {"n": code.n, "k": code.k, "d": code.min_distance() if code.k else 0}

    if "multispectra" in wanted:
        try:
            table = timed("multispectra", lambda: hi_multispectra(s, threads=threads))
            mask, best = table.max_entry()
            low_mask, low = table.min_entry()
            rep["multispectra"] = {
                "max": best, "argmax": mask_to_gates(mask, s.n),
                "min": low, "argmin": mask_to_gates(low_mask, s.n),
                "entries": {str(m): v for m, v in table.entries.items()},
            }
            if lp is not None and s.exact:
                ranked = rank_multispectra(lp)
                if ranked.entries != table.entries:
                    raise CrossCheckError("rank-based multispectra disagrees with the numeric walk")
        except PreconditionError as exc:
            skipped["multispectra"] = str(exc)

    if "parl" in wanted:
        try:
            if lp is not None:
                res = timed("parl", lambda: par_l_exact_lp(lp))
                if inp.n <= 5:
                    opt = par_l_optimize(s, OptimizerConfig(seed=args.seed, threads=threads))
                    if opt.par_l > float(res.par_l) * (1 + 1e-6):
                        raise CrossCheckError("optimizer exceeded the exact PAR_l")
            else:
                res = timed("parl", lambda: par_l_optimize(s, OptimizerConfig(seed=args.seed, threads=threads)))
            rep["par_l"] = res.par_l
            rep["le"] = res.le
            rep["parl_method"] = res.method
            witnesses["par_l"] = res.witness
        except PreconditionError as exc:
            skipped["parl"] = str(exc)

    if "hierarchy" in wanted:
        if code is None:
            skipped["hierarchy"] = "no associated linear code"
        else:
            try:
                wh = timed("hierarchy", lambda: weight_hierarchy_spectral(code, threads))
                if code.k <= 8 and weight_hierarchy_oracle(code).d != wh.d:
                    raise CrossCheckError("spectral and enumerated weight hierarchies differ")
                rep["hierarchy"] = list(wh.d)
                witnesses["hierarchy"] = [mask_to_gates(m, code.n) for m in wh.witnesses]
            except PreconditionError as exc:
                skipped["hierarchy"] = str(exc)

    if "se" in wanted:
        if lp is None:
            skipped["se"] = "needs a bipartite quadratic form"
        else:
            try:
                tr = timed("se", lambda: se_search(lp, threads))
                rep["beta"] = list(tr.beta)
                witnesses["se_basis"] = tr.basis
            except PreconditionError as exc:
                skipped["se"] = str(exc)

    if "crypto" in wanted:
        bip = lp.phase if lp is not None else None
        target = expand(lp) if lp is not None else s
        try:
            prof = timed("crypto", lambda: crypto_profile(target))
            rep["N"] = prof.nonlinear_order
            rep["ci"] = prof.ci_order
            rep["bounds"] = list(prof.parl_log2_bounds)
            if bip is not None and inp.code is not None:
                rep["crypto_source"] = print_anf(bip)
        except PreconditionError as exc:
            skipped["crypto"] = str(exc)

    rep["witnesses"] = witnesses
    rep["timings"] = timings
    if skipped:
        rep["skipped"] = skipped
    return rep


def cmd_analyze(args) -> int:
    inp = _load(args)
    rep = _analysis(inp, args, _threads(args))
    _write(json.dumps(jsonable(rep), indent=2) + "\n", args.out)
    return 0


# -- trajectory ------------------------------------------------------------------

def _int_list(text: str | None, bits: bool = False) -> list[int] | None:
    if text is None:
        return None
    if bits and "," not in text and set(text.strip()) <= {"0", "1"}:
        return [int(ch) for ch in text.strip()]
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def format_trajectory(tr, n: int) -> str:
    head = f"{'step':>4}  {'Q':<{2 * n + 2}}  {'HI':<{n}}  {'action':<7}  {'qubit':>5}  " \
           f"{'outcome':>7}  {'PAR':>6}  {'m_Q':>3}  {'codewords':>9}  {'order':>5}"
    lines = [f"basis {tr.basis}", head]
    for i, st in enumerate(tr.steps):
        q = "{" + ",".join(map(str, st.q)) + "}" if st.q else "{-}"
        par_txt = str(st.par) if isinstance(st.par, Fraction) else f"{st.par:.6g}"
        lines.append(
            f"{i:>4}  {q:<{2 * n + 2}}  {st.gates:<{n}}  {st.action:<7}  "
            f"{'-' if st.qubit is None else st.qubit:>5}  "
            f"{'-' if st.outcome is None else st.outcome:>7}  {par_txt:>6}  "
            f"{st.m_q:>3}  {st.codewords:>9}  {st.order:>5}"
        )
    if tr.beta:
        lines.append("beta " + " ".join(f"b{j}={b}" for j, b in enumerate(tr.beta)))
    return "\n".join(lines) + "\n"


def cmd_trajectory(args) -> int:
    inp = _load(args)
    order = _int_list(args.order)
    outcomes = _int_list(args.outcomes, bits=True)
    if args.search:
        lp = inp.lp_form()
        if lp is None:
            raise PreconditionError("--search needs a bipartite quadratic form")
        tr = se_search(lp, _threads(args))
    else:
        if args.basis is None:
            raise ParseError("give --basis or --search")
        if len(args.basis) != inp.n:
            raise PreconditionError(f"basis string must have length n={inp.n}")
        mask = gates_to_mask(args.basis)
        if order is None:
            tr = greedy_trajectory(inp.state, mask)
        else:
            if outcomes is not None and len(outcomes) != len(order):
                raise ParseError("--outcomes must match --order in length")
            tr = run_trajectory(inp.state, mask, order, outcomes)
    _write(format_trajectory(tr, inp.n), args.out)
    return 0


# -- selftest --------------------------------------------------------------------

def _selftest_checks(seed: int):
    from .apf import Anf, apply_h_symbolic
    from .transforms import H, apply_gate, apply_h, nega_hadamard_ghz

    c322 = LinearCode.from_strings(["110", "011"])
    yield "duality [3,2,2] -> [3,1,3]", wht(indicator_from_code(c322)).proportional_to(
        StateVector.from_ints([1, 0, 0, 0, 0, 0, 0, 1]))

    a = Apf.bipolar("x3*x0 + x0*x2 + x2*x1 + x1*x4 + x4*x0")
    numeric = hi_multispectra(apply_h(expand(a), [2, 3, 4]))
    ranked = rank_multispectra(a, relative_mask=0b11100)
    yield "5-qubit multispectra numeric == rank", numeric.entries == ranked.entries
    yield "5-qubit first row", [numeric.grid([0, 1], [2, 3, 4])[0][i] for i in range(8)] == [8, 4, 4, 2, 4, 2, 2, 1]

    c = LinearCode.from_strings(["11010", "01101"])
    yield "weight hierarchy (0,3,5)", weight_hierarchy_spectral(c).d == weight_hierarchy_oracle(c).d == (0, 3, 5)

    ghz = nega_hadamard_ghz(expand(Apf.bipolar("x0*x1 + x0*x2 + x1*x2")), 0)
    yield "NegaHadamard GHZ support", list(np.flatnonzero(ghz.amps.any(axis=0))) == [0, 7]

    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(50):
        n = int(rng.integers(2, 6))
        monos = [int(m) for m in rng.integers(1, 1 << n, size=int(rng.integers(1, 5))) if bin(int(m)).count("1") <= 2]
        phase = Apf(n, (), Anf.from_monomials(n, monos))
        q = int(rng.integers(0, n))
        sym = expand(apply_h_symbolic(phase, q))
        ok &= sym.proportional_to(apply_gate(expand(phase), q, H))
    yield "symbolic H agrees with numeric H", bool(ok)


def cmd_selftest(args) -> int:
    failed = 0
    for name, ok in _selftest_checks(args.seed):
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += not ok
    if failed:
        raise CrossCheckError(f"{failed} self-test check(s) failed")
    return 0


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entangle-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, default=None, help="worker cap (env ENTANGLE_LAB_THREADS)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("convert", help="convert between ANF, code and vector forms")
    _add_input(c)
    c.add_argument("--to", choices=("code", "anf", "vector"), required=True)
    c.add_argument("--side", default="C", choices=("C", "Cperp"))
    c.add_argument("--out")
    c.set_defaults(func=cmd_convert)

    a = sub.add_parser("analyze", help="JSON report of entanglement measures")
    _add_input(a)
    for flag in ("multispectra", "parl", "hierarchy", "se", "crypto"):
        a.add_argument(f"--{flag}", action="store_true")
    mode = a.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact arithmetic (default)")
    mode.add_argument("--float", action="store_true", help="analyze a float copy of the state")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("trajectory", help="measurement trajectory table")
    _add_input(t)
    g = t.add_mutually_exclusive_group(required=True)
    g.add_argument("--basis", help="H/I string taking the input to the measurement basis")
    g.add_argument("--search", action="store_true", help="most-destructive search")
    t.add_argument("--order", help="comma-separated qubit order (default: greedy)")
    t.add_argument("--outcomes", help="outcome bits for --order, e.g. 00101 or 0,0,1,0,1")
    t.add_argument("--out")
    t.set_defaults(func=cmd_trajectory)

    s = sub.add_parser("selftest", help="reproduce reference tables and cross-checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None:
        args.seed = 0
    try:
        return args.func(args)
    except EntangleLabError as exc:
        print(f"entangle-lab: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
