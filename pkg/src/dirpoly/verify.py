"""Named invariant suites used by ``dirpoly verify``."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Dict, List

import numpy as np

from . import ffield, momentpoly, rmt, schur
from .exactnum import PiecewisePoly, Poly, format_rational, pw_convolve, pw_integrate


@dataclass
class Gate:
    name: str
    measured: str
    required: str
    passed: bool
    seconds: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)


def _gate(name: str, fn: Callable[[], tuple]) -> Gate:
    t0 = time.perf_counter()
    try:
        measured, required, ok = fn()
    except Exception as exc:  # a crashing gate is a failing gate
        measured, required, ok = f"error: {exc!r}", "no exception", False
    return Gate(name, _fmt(measured), _fmt(required), bool(ok), time.perf_counter() - t0)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


# ---------------------------------------------------------------------------
# exact


def _m2():
    f = momentpoly.compute_Mk(2).scale(24)
    want = PiecewisePoly([0, 1, 2], [Poly.monomial(4), momentpoly.M2_MIDDLE], Poly.const(2))
    return f == want, "pieces of 24*M_2", f == want


def _m3():
    f = momentpoly.compute_Mk(3).scale(math.factorial(9))
    want = PiecewisePoly([0, 1, 2, 3], [Poly.monomial(9), momentpoly.M3_MIDDLE,
                                        momentpoly.M3_UPPER], Poly.const(42))
    return f == want, "pieces of 9!*M_3", f == want


def _gamma_eq(k):
    def run():
        ok = momentpoly.compute_gamma(k) == momentpoly.gamma_oracle(k)
        return ok, True, ok
    return run


def _gamma_mass(k):
    def run():
        mass = pw_integrate(momentpoly.compute_gamma(k), 0, k)
        g = momentpoly.compute_gk(k)
        return mass, g, mass == g
    return run


def _structural(k):
    def run():
        a = Poly.x()
        fails = []
        if momentpoly.compute_P(0, k) != a ** (k * k):
            fails.append("P0")
        M = momentpoly.compute_Mk(k)
        if not mk_symmetric(M, k, momentpoly.compute_gk(k)):
            fails.append("symmetry")
        for r in range(k + 1):
            if momentpoly.vanishing_order(k, r) < (k - r) ** 2 + r ** 2:
                fails.append(f"vanish r={r}")
        for ell in range(1, k):
            if momentpoly.smoothness_order(M, ell) < momentpoly.smoothness_bound(k, ell):
                fails.append(f"smooth l={ell}")
        g = momentpoly.compute_gamma(k)
        if g.reflect(k) != g:
            fails.append("gamma symmetry")
        return fails or "all", "no failures", not fails
    return run


def mk_symmetric(M: PiecewisePoly, k: int, g) -> bool:
    """``M(a) + M(k - a) = g`` piecewise on the integer grid 0..k."""
    pieces = [M.piece_at(ell) for ell in range(k)]
    return all(pieces[ell] + pieces[k - 1 - ell].compose_linear(k, -1) == Poly.const(g)
               for ell in range(k))


def _uniqueness():
    rep = momentpoly.uniqueness_check_k3()
    ok = rep.solution_space_dim == 0 and rep.middle == momentpoly.M3_MIDDLE
    return f"dim={rep.solution_space_dim}", "dim=0 and witness = 9!M_3 middle", ok


def _ik_examples():
    got = [schur.exact_Ik(2, 1, 4), schur.exact_Ik(2, 2, 3), schur.exact_Ik(1, 0, 5),
           schur.exact_Ik(2, 0, 2), schur.fN_coeffs(1, 2), schur.fN_coeffs(2, 1)]
    want = [4, 10, 1, 1, [1, 1, 1], [1, 4, 1]]
    return got, want, got == want


def _ik_binomial():
    bad = [(n, N) for N in (3, 6, 9) for n in range(N + 1)
           if schur.exact_Ik(2, n, N) != comb(n + 3, 3)]
    return bad or "none", "I_2(n,N)=C(n+3,3) for n<=N", not bad


def _palindrome():
    rows = [schur.fN_coeffs(k, N) for k, N in ((2, 6), (3, 4), (2, 9))]
    ok = all(r == r[::-1] for r in rows)
    return ok, True, ok


def _itilde_routes():
    a = [schur.exact_Itilde(2, m, 6) for m in (3, 6, 9)]
    b = [schur.exact_Itilde_direct(2, m, 6) for m in (3, 6, 9)]
    return a, b, a == b


def _ffik_k1():
    rows = rmt.check_ffik(1, 10, range(1, 10))
    ok = all(r["scaled_diff_exact"] == 0 for r in rows)
    return ok, "all zero", ok


def _ffik_k2():
    g1 = momentpoly.compute_gamma(2)(1)
    diffs = [abs(Fraction(schur.exact_Ik(2, N, N), N ** 3) - g1) for N in (8, 16, 32)]
    dec = diffs[0] > diffs[1] > diffs[2]
    scaled = [d * N for d, N in zip(diffs, (8, 16, 32))]
    band = max(scaled) / min(scaled) <= 4
    return [float(d) for d in diffs], "decreasing, N-scaled band <= 4", dec and band


def _if1():
    worst = 0.0
    g = momentpoly.compute_gamma(2)
    for N in (8, 16, 32):
        lhs = Fraction(schur.exact_Itilde(2, N, N), N ** 4)
        d = abs(lhs - pw_integrate(g, 0, 1))
        worst = max(worst, float(d * N))
    return worst, "<= 1", worst <= 1


def _gk():
    got = [momentpoly.compute_gk(k) for k in (1, 2, 3)]
    want = [1, Fraction(1, 12), Fraction(1, 8640)]
    return got, want, got == want


def _json_roundtrip():
    fs = [momentpoly.compute_Mk(k) for k in (1, 2, 3)] + [momentpoly.compute_gamma(3)]
    ok = all(PiecewisePoly.from_json(f.dumps()) == f for f in fs)
    return ok, True, ok


def _hat():
    ind = PiecewisePoly.indicator(0, 1)
    got = pw_convolve(ind, ind)
    want = PiecewisePoly([0, 1, 2], [Poly.x(), Poly([2, -1])], Poly())
    return got == want, "indicator * indicator = hat", got == want


def exact_suite() -> List[Gate]:
    gates = [_gate("M2 pieces", _m2), _gate("M3 pieces", _m3)]
    gates += [_gate(f"gamma route k={k}", _gamma_eq(k)) for k in (1, 2, 3, 4)]
    gates += [_gate(f"gamma mass k={k}", _gamma_mass(k)) for k in (1, 2, 3, 4)]
    gates += [_gate(f"structure k={k}", _structural(k)) for k in (1, 2, 3, 4)]
    gates += [
        _gate("k=3 uniqueness", _uniqueness),
        _gate("g_k values", _gk),
        _gate("I_k small cases", _ik_examples),
        _gate("I_2 binomial law", _ik_binomial),
        _gate("F_N palindromic", _palindrome),
        _gate("Itilde two routes", _itilde_routes),
        _gate("ffik k=1 exact", _ffik_k1),
        _gate("ffik k=2 trend", _ffik_k2),
        _gate("if1 bound", _if1),
        _gate("json round trip", _json_roundtrip),
        _gate("hat convolution", _hat),
    ]
    return gates


# ---------------------------------------------------------------------------
# rmt


def rmt_suite(seed: int = 0, workers: int = 1, samples: int = 20_000) -> List[Gate]:
    def haar_moments():
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(999,)))
        u = rmt.haar_unitary(4, rng, size=samples)
        tr = np.trace(u, axis1=1, axis2=2)
        m1, m2 = abs(tr.mean()), float((abs(tr) ** 2).mean())
        tol = 5 / math.sqrt(samples)
        ok = m1 < tol and abs(m2 - 1) < 5 * math.sqrt(2 / samples)
        return f"|E tr|={m1:.4f} E|tr|^2={m2:.4f}", "0 and 1 within 5 sigma", ok

    def reversal():
        rng = np.random.default_rng(seed)
        worst = max(rmt.secular_coeffs(rmt.haar_sample(8, rng)).reversal_defect()
                    for _ in range(20))
        return worst, "< 1e-10", worst < 1e-10

    def mc_point(k, n, N):
        def run():
            est = rmt.mc_Ik(k, n, N, samples, seed, workers)
            exact = schur.exact_Ik(k, n, N)
            z = abs(est.mean - exact) / est.stderr if est.stderr else 0.0
            return f"{est.mean:.3f}+-{est.stderr:.3f} vs {exact}", "within 4 stderr", z <= 4
        return run

    gates = [_gate("Haar trace moments", haar_moments), _gate("reversal symmetry", reversal)]
    for k, n, N in ((1, 2, 4), (2, 3, 4), (2, 6, 6), (3, 4, 3)):
        gates.append(_gate(f"mc I_{k}({n},{N})", mc_point(k, n, N)))
    return gates


# ---------------------------------------------------------------------------
# ffield


def ffield_suite() -> List[Gate]:
    def necklace():
        bad = []
        for q in (2, 3, 5):
            t = ffield.build_irreducibles(q, 4)
            for d, c in t.counts().items():
                if c != ffield.necklace_count(q, d):
                    bad.append((q, d))
        return bad or "none", "counts = necklace formula", not bad

    def routes():
        cases = [(2, 2, 5, 1), (3, 2, 4, 1), (2, 3, 6, 1), (3, 2, 5, 0)]
        bad = [c for c in cases if ffield.ff_variance(*c).lhs != ffield.ff_variance_enumerate(*c).lhs]
        return bad or "none", "enumeration = convolution", not bad

    def k1_zero():
        vals = [ffield.ff_variance(q, 1, 6, h).lhs for q in (3, 5) for h in (1, 2)]
        ok = all(v == 0 for v in vals)
        return vals, "all zero", ok

    def kr3_small():
        scaled = []
        for q in (3, 5, 7):
            r = ffield.ff_variance(q, 2, 6, 1)
            scaled.append(float(abs(r.normalized - r.rmt_value)) * q ** 0.5)
        nz = [s for s in scaled if s > 0]
        ok = not nz or max(nz) / min(nz) <= 4
        return scaled, "max/min <= 4", ok

    return [_gate("irreducible counts", necklace), _gate("variance two routes", routes),
            _gate("k=1 variance zero", k1_zero), _gate("KR3 n=6 h=1 band", kr3_small)]


# ---------------------------------------------------------------------------
# number field


def nf_suite() -> List[Gate]:
    from .arith import euler, sieve, stats, zeta

    X = 10 ** 4
    tab2 = sieve.sieve_dk(2, X)

    def hyperbola():
        lhs = int(tab2.values.sum())
        rhs = sum(X // d for d in range(1, X + 1))
        return lhs, rhs, lhs == rhs

    def prime_powers():
        bad = []
        for k in (2, 3, 4):
            t = sieve.sieve_dk(k, X)
            for p in sieve.primes_upto(X).tolist():
                e, pe = 1, p
                while pe <= X:
                    if t[pe] != comb(e + k - 1, k - 1):
                        bad.append((k, pe))
                    e, pe = e + 1, pe * p
        return bad or "none", "d_k(p^e) = C(e+k-1,k-1)", not bad

    def surrogate():
        H = 7.3
        th = H - math.floor(H)
        got = stats.lattice_surrogate(10 ** 6, H)
        return got, f"{th * (1 - th):.4f} +- 1e-3", abs(got - th * (1 - th)) <= 1e-3

    def partition():
        sums, coprime = stats.ap_class_sums(2, 10 ** 5, 101)
        tot = int(sums[1:].sum())
        return tot, coprime, tot == coprime

    def a2():
        v = euler.compute_ak(2, 10 ** 6).value
        import mpmath
        err = float(abs(v - 6 / mpmath.pi ** 2))
        return err, "<= 1e-9", err <= 1e-9

    def residue_k2():
        Xr = 10 ** 6
        c = zeta.residue_main_term(2)
        main = float(zeta.main_term(float(Xr), c))
        actual = sum(Xr // d for d in range(1, Xr + 1))
        err = abs(actual - main)
        return err, f"<= X^0.8 = {Xr ** 0.8:.0f}", err <= Xr ** 0.8

    def dirichlet():
        r = stats.dirichlet_mean_square(1, 1e4, 0.5)
        return r.normalized, "within 15% of 0.5", abs(r.normalized - 0.5) <= 0.075

    return [_gate("hyperbola identity", hyperbola), _gate("prime power law", prime_powers),
            _gate("k=1 surrogate", surrogate), _gate("AP partition identity", partition),
            _gate("a_2 = 6/pi^2", a2), _gate("k=2 residue main term", residue_k2),
            _gate("Dirichlet k=1 alpha=1/2", dirichlet)]


SUITES: Dict[str, Callable[..., List[Gate]]] = {
    "exact": exact_suite, "rmt": rmt_suite, "ffield": ffield_suite, "nf": nf_suite,
}


def run_suite(name: str, seed: int = 0, workers: int = 1) -> List[Gate]:
    if name == "all":
        out: List[Gate] = []
        for key in SUITES:
            out += run_suite(key, seed, workers)
        return out
    if name not in SUITES:
        raise KeyError(name)
    if name == "rmt":
        return rmt_suite(seed, workers)
    return SUITES[name]()
