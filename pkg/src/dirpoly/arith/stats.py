"""Short-interval, progression and Dirichlet-polynomial statistics of d_k."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import factorial
from typing import Optional

import numpy as np

from ..ffield import is_prime
from ..momentpoly import compute_gamma, compute_Mk
from .euler import compute_ak, compute_ak_q
from .sieve import SEGMENT, SieveTable, iter_dk
from .zeta import ZetaLaurent, dirichlet_residue, main_term, residue_main_term

#: direct Dirichlet sums are limited to this many terms
DIRECT_MAX = 10 ** 5
T_MAX = 10 ** 5
#: Bernoulli corrections used by the Euler-Maclaurin route
EM_TERMS = 8
T_CHUNK = 2048

# two-point Gauss-Legendre on [0, 1]
_GL_X = np.array([0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0)])


def pw_float(f, x: float) -> float:
    """Evaluate an exact piecewise polynomial at a float (exactly, then round)."""
    return float(f(Fraction(x)))


@dataclass(frozen=True)
class VarianceRow:
    k: int
    X: int
    alpha: float
    H: float
    variance: float
    prediction: float
    ratio: Optional[float]
    mean_delta: float = 0.0
    checksum: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def _ratio(value: float, prediction: float) -> Optional[float]:
    return value / prediction if prediction != 0 else None


def _blocks(k: int, lo: int, hi: int, table: Optional[SieveTable]):
    """``(a, d_k(a..b-1))`` blocks for ``lo <= n < hi`` from a table or a fresh sieve."""
    if table is None:
        yield from iter_dk(k, lo, hi)
        return
    if table.k != k or not table.covers(lo, hi - 1):
        raise ValueError("sieve table too small for the requested range")
    for a in range(lo, hi, SEGMENT):
        b = min(a + SEGMENT, hi)
        yield a, table.window(a, b - 1)


def short_interval_integral(k: int, X: int, H: float, table: Optional[SieveTable] = None,
                            coeffs=None):
    """``(int_X^{2X} Delta^2 dx, int_X^{2X} Delta dx)`` with exact unit-interval splitting.

    ``Delta(x) = sum_{x<n<=x+H} d_k(n) - (M(x+H) - M(x))``.  On ``[j, j+1)`` the
    count is constant except for one jump at ``j + 1 - theta``; the smooth main
    term is integrated by two-point Gauss-Legendre on each constant piece.
    ``coeffs=None`` means the main term of d_1 (``M(y) = y``).
    """
    if H < 1:
        raise ValueError("H must be >= 1")
    Hf = int(math.floor(H))
    theta = H - Hf
    sq_total = 0.0
    lin_total = 0.0
    need_hi = 2 * X + Hf + 2
    carry = np.zeros(0, dtype=np.int64)
    start_n = X + 1
    # stream d_k over n in [X+1, 2X+Hf+1]; j ranges over [X, 2X)
    buf_start = start_n
    for a, vals in _blocks(k, start_n, need_hi, table):
        buf = np.concatenate([carry, np.asarray(vals, dtype=np.int64)])
        # j usable when n up to j + Hf + 1 is available
        buf_end = a + len(vals)  # exclusive
        j_lo = buf_start - 1
        j_hi = min(buf_end - Hf - 1, 2 * X)
        if j_hi > j_lo:
            P = np.concatenate([[0], np.cumsum(buf)])
            js = np.arange(j_lo, j_hi, dtype=np.int64)
            off = js - j_lo
            c1 = (P[off + Hf] - P[off]).astype(float)
            c2 = (P[off + Hf + 1] - P[off]).astype(float)
            jf = js.astype(float)
            w1 = 1.0 - theta
            sq = np.zeros(len(js))
            ln = np.zeros(len(js))
            for count, left, width in ((c1, jf, w1), (c2, jf + w1, theta)):
                if width == 0.0:
                    continue
                for g in _GL_X:
                    x = left + g * width
                    if coeffs is None:
                        m = np.full_like(x, H)
                    else:
                        m = main_term(x + H, coeffs) - main_term(x, coeffs)
                    d = count - m
                    sq += 0.5 * width * d * d
                    ln += 0.5 * width * d
            sq_total += math.fsum(sq)
            lin_total += math.fsum(ln)
            consumed = j_hi - j_lo
            carry = buf[consumed:]
            buf_start += consumed
        else:
            carry = buf
    return sq_total, lin_total


def short_interval_variance(k: int, X: int, alpha: float, table: Optional[SieveTable] = None,
                            laurent: Optional[ZetaLaurent] = None,
                            pmax: int = 10 ** 6) -> VarianceRow:
    """``(1/(HX)) int_X^{2X} |Delta_k(x, H)|^2 dx`` at ``H = X^{1 - 1/alpha}``."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    H = X ** (1.0 - 1.0 / alpha)
    if H < 2:
        raise ValueError("H = X^(1-1/alpha) must be >= 2")
    coeffs = residue_main_term(k, laurent)
    sq, lin = short_interval_integral(k, X, H, table, coeffs)
    variance = sq / (H * X)
    ak = float(compute_ak(k, pmax).value)
    pred = ak * math.log(X ** (1.0 / alpha)) ** (k * k - 1) * pw_float(compute_gamma(k), alpha)
    return VarianceRow(k, X, alpha, H, variance, pred, _ratio(variance, pred), lin / X,
                       table.checksum() if table is not None else "")


def lattice_surrogate(X: int, H: float) -> float:
    """``(1/X) int_X^{2X} (floor(x+H) - floor(x) - H)^2 dx``, the d_1 short-interval law."""
    sq, _ = short_interval_integral(1, X, H, None, None)
    return sq / X


@dataclass(frozen=True)
class APRow:
    k: int
    X: int
    q: int
    alpha: float
    variance: float
    prediction: float
    ratio: Optional[float]
    class_total: int
    coprime_total: int
    checksum: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def ap_class_sums(k: int, X: int, q: int, table: Optional[SieveTable] = None):
    """Exact sums of d_k(n) over n <= X in each class mod q, and the coprime total."""
    sums = np.zeros(q, dtype=np.int64)
    coprime = 0
    for a, vals in _blocks(k, 1, X + 1, table):
        vals = np.asarray(vals, dtype=np.int64)
        res = np.arange(a, a + len(vals), dtype=np.int64) % q
        part = np.bincount(res, weights=vals.astype(float), minlength=q)
        if float(vals.sum()) >= 2.0 ** 53:
            raise OverflowError("block sum beyond exact float range")
        sums += np.rint(part).astype(np.int64)
        coprime += int(vals[res != 0].sum())
    return sums, coprime


def ap_variance(k: int, X: int, q: int, table: Optional[SieveTable] = None,
                laurent: Optional[ZetaLaurent] = None, pmax: int = 10 ** 6) -> APRow:
    """``(1/X) sum_{(a,q)=1} (S_a - main)^2`` normalized by ``a_k(q) (log q)^{k^2-1}``."""
    if not is_prime(q):
        raise ValueError("q must be prime")
    if q >= X:
        raise ValueError("q must be smaller than X")
    sums, coprime = ap_class_sums(k, X, q, table)
    class_total = int(sums[1:].sum())
    coeffs = residue_main_term(k, laurent, q=q)
    main = float(main_term(float(X), coeffs)) / (q - 1)
    dev = sums[1:].astype(float) - main
    variance = math.fsum(dev * dev) / X
    alpha = math.log(X) / math.log(q)
    akq = float(compute_ak_q(k, q, pmax).value)
    pred = akq * math.log(q) ** (k * k - 1) * pw_float(compute_gamma(k), alpha)
    return APRow(k, X, q, alpha, variance, pred, _ratio(variance, pred), class_total,
                 coprime, table.checksum() if table is not None else "")


@dataclass(frozen=True)
class DirichletResult:
    k: int
    T: float
    alpha: float
    N: float
    value: float
    normalized: float
    target: float
    method: str
    step: float

    def to_json(self) -> dict:
        return asdict(self)


def _trapezoid_grid(T: float, N: float):
    h_max = math.pi / (8.0 * math.log(N))
    steps = max(2, math.ceil(T / h_max))
    t = np.linspace(0.0, T, steps + 1)
    w = np.full(steps + 1, T / steps)
    w[0] = w[-1] = 0.5 * T / steps
    return t, w, T / steps


def _direct_sums(t: np.ndarray, coef: np.ndarray, logn: np.ndarray) -> np.ndarray:
    out = np.empty(len(t), dtype=complex)
    for i in range(0, len(t), T_CHUNK):
        tc = t[i:i + T_CHUNK]
        out[i:i + T_CHUNK] = np.exp(-1j * np.outer(tc, logn)) @ coef
    return out


def _em_partial_zeta(t: np.ndarray, K: int, M: int) -> np.ndarray:
    """``sum_{n<=K} n^{-s}`` at ``s = 1/2 + it`` by Euler-Maclaurin from n = M."""
    from mpmath import bernoulli
    n = np.arange(1, M, dtype=float)
    head = _direct_sums(t, n ** -0.5, np.log(n))
    s = 0.5 + 1j * t
    Mf, Kf = float(M), float(K)
    one_minus = 1.0 - s
    integral = (np.exp(one_minus * math.log(Kf)) - np.exp(one_minus * math.log(Mf))) / one_minus
    fM = np.exp(-s * math.log(Mf))
    fK = np.exp(-s * math.log(Kf))
    acc = head + integral + 0.5 * (fM + fK)
    # f^{(m)}(x) = (-s)(-s-1)...(-s-m+1) x^{-s-m}
    fall = np.ones_like(s)
    for m in range(1, 2 * EM_TERMS):
        fall = fall * (-s - (m - 1))
        if m % 2 == 1:
            j = (m + 1) // 2
            b = float(bernoulli(2 * j)) / factorial(2 * j)
            dK = fall * np.exp((-s - m) * math.log(Kf))
            dM = fall * np.exp((-s - m) * math.log(Mf))
            acc = acc + b * (dK - dM)
    return acc


def dirichlet_mean_square(k: int, T: float, alpha: float, table: Optional[SieveTable] = None,
                          laurent: Optional[ZetaLaurent] = None,
                          pmax: int = 10 ** 6) -> DirichletResult:
    """``(1/T) int_0^T |sum_{n<=N} d_k(n) n^{-1/2-it} - Res|^2 dt`` with ``N = [T^alpha] + 1/2``.

    Sums of at most ``DIRECT_MAX`` terms are evaluated directly.  For k = 1
    and longer sums the partial zeta sum is reduced by Euler-Maclaurin to
    about ``T/pi`` terms; the quadrature grid is the same in both cases.
    """
    if T > T_MAX:
        raise ValueError(f"T exceeds {T_MAX}")
    K = int(math.floor(T ** alpha))
    if K < 1:
        raise ValueError("T^alpha must be >= 1")
    N = K + 0.5
    t, w, step = _trapezoid_grid(T, N)
    laurent = laurent or ZetaLaurent.default()
    if K <= DIRECT_MAX:
        if table is not None:
            if table.k != k or not table.covers(1, K):
                raise ValueError("sieve table too small")
            d = table.window(1, K).astype(float)
        else:
            d = np.concatenate([np.asarray(v, dtype=float) for _, v in iter_dk(k, 1, K + 1)])
        n = np.arange(1, K + 1, dtype=float)
        S = _direct_sums(t, d * n ** -0.5, np.log(n))
        method = "direct"
    elif k == 1:
        M = min(K, int(math.ceil(T / math.pi)) + 50)
        S = _em_partial_zeta(t, K, M)
        method = "euler-maclaurin"
    else:
        raise ValueError(f"N exceeds {DIRECT_MAX} (Euler-Maclaurin route only for k = 1)")
    R = dirichlet_residue(t, N, k, laurent)
    integrand = np.abs(S - R) ** 2
    value = math.fsum(w * integrand) / T
    ak = float(compute_ak(k, pmax).value)
    normalized = value / (ak * math.log(T) ** (k * k))
    target = pw_float(compute_Mk(k), alpha)
    return DirichletResult(k, T, alpha, N, value, normalized, target, method, step)
