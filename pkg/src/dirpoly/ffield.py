"""Divisor-function variance in short intervals of F_q[x], computed exactly.

A monic polynomial of degree n is indexed by its lower coefficients read as
base-q digits (``a_0`` least significant).  The short interval
``{f : deg(f - A) <= h}`` is then a contiguous block of ``q^{h+1}`` indices.

Two exact routes are provided:

* :func:`ff_variance_enumerate` factors every monic polynomial of degree n by
  trial division and accumulates interval sums.  Simple, slow.
* :func:`ff_variance` uses that the interval of ``f`` only depends on the
  reversed polynomial ``x^n f(1/x)`` modulo ``x^{n-h}``, and that reversal is
  multiplicative.  Interval sums of d_k then become counts of k-tuples of
  truncated reversed factors, obtained by exact convolution on the group of
  truncated power series with constant term 1.  Used for the large sweeps.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exactnum import format_rational
from .schur import exact_Ik

ENUM_BUDGET = 10 ** 7
FLOAT_EXACT = 2 ** 53


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % p for p in range(2, isqrt(q) + 1))


def _check_q(q: int) -> None:
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")


@dataclass(frozen=True)
class FFPoly:
    """Polynomial over F_q, coefficients lowest degree first."""
    q: int
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        c = [a % self.q for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __mul__(self, other: "FFPoly") -> "FFPoly":
        return FFPoly(self.q, _mul(self.coeffs, other.coeffs, self.q))

    def __repr__(self) -> str:
        return f"FFPoly(q={self.q}, {list(self.coeffs)})"


def _mul(a: Sequence[int], b: Sequence[int], q: int) -> Tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % q
    return tuple(out)


def _divmod_monic(f: Sequence[int], g: Sequence[int], q: int):
    """Quotient and remainder of f by the monic polynomial g."""
    r = list(f)
    dg = len(g) - 1
    if len(r) - 1 < dg:
        return (), tuple(r)
    quot = [0] * (len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i] % q
        if c:
            quot[i - dg] = c
            for j in range(dg + 1):
                r[i - dg + j] = (r[i - dg + j] - c * g[j]) % q
    r = r[:dg]
    while r and r[-1] == 0:
        r.pop()
    return tuple(quot), tuple(r)


def monic_from_index(idx: int, n: int, q: int) -> Tuple[int, ...]:
    digits = []
    for _ in range(n):
        idx, d = divmod(idx, q)
        digits.append(d)
    return tuple(digits) + (1,)


@dataclass
class IrreducibleTable:
    q: int
    max_deg: int
    by_degree: Dict[int, List[Tuple[int, ...]]]

    def counts(self) -> Dict[int, int]:
        return {d: len(v) for d, v in self.by_degree.items()}

    def irreducibles(self, max_deg: Optional[int] = None):
        top = self.max_deg if max_deg is None else max_deg
        for d in range(1, top + 1):
            yield from self.by_degree.get(d, [])


def mobius(n: int) -> int:
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


def necklace_count(q: int, d: int) -> int:
    """Number of monic irreducibles of degree d over F_q."""
    return sum(mobius(e) * q ** (d // e) for e in range(1, d + 1) if d % e == 0) // d


def build_irreducibles(q: int, max_deg: int) -> IrreducibleTable:
    """Monic irreducibles up to ``max_deg`` by trial division, checked against necklace counts."""
    _check_q(q)
    if q ** max_deg > ENUM_BUDGET:
        raise ValueError(f"q^max_deg = {q ** max_deg} exceeds the enumeration budget")
    table: Dict[int, List[Tuple[int, ...]]] = {}
    for d in range(1, max_deg + 1):
        found = []
        smaller = [g for e in range(1, d // 2 + 1) for g in table[e]]
        for idx in range(q ** d):
            f = monic_from_index(idx, d, q)
            if all(_divmod_monic(f, g, q)[1] for g in smaller):
                found.append(f)
        table[d] = found
        if len(found) != necklace_count(q, d):
            raise ArithmeticError(f"irreducible count mismatch at degree {d}")
    return IrreducibleTable(q, max_deg, table)


def factor(f: Sequence[int], table: IrreducibleTable) -> List[Tuple[Tuple[int, ...], int]]:
    """Factor a monic polynomial into ``(irreducible, exponent)`` pairs."""
    q = table.q
    f = tuple(f)
    if len(f) - 1 > table.max_deg:
        raise ValueError("polynomial degree exceeds the irreducible table")
    out = []
    for g in table.irreducibles():
        if 2 * (len(g) - 1) > len(f) - 1:
            break
        e = 0
        while True:
            quo, rem = _divmod_monic(f, g, q)
            if rem:
                break
            f, e = quo, e + 1
        if e:
            out.append((g, e))
    if len(f) > 1:
        out.append((f, 1))
    return out


def ff_dk(f, k: int, table: IrreducibleTable) -> int:
    """Number of ordered factorizations ``f = f_1 ... f_k`` into monic factors."""
    coeffs = f.coeffs if isinstance(f, FFPoly) else tuple(f)
    out = 1
    for _, e in factor(coeffs, table):
        out *= comb(e + k - 1, k - 1)
    return out


@dataclass
class FFVarianceResult:
    q: int
    k: int
    n: int
    h: int
    lhs: Fraction
    rmt_value: int
    main_term: int

    @property
    def normalized(self) -> Fraction:
        return self.lhs / self.q ** (self.h + 1)

    def to_json(self) -> dict:
        return {"q": self.q, "k": self.k, "n": self.n, "h": self.h,
                "lhs": format_rational(self.lhs), "rmt": str(self.rmt_value),
                "main": str(self.main_term)}


def _rmt_value(k: int, n: int, h: int) -> int:
    N = n - h - 2
    return exact_Ik(k, n, N) if N >= 1 else 0


def _check_nh(n: int, h: int) -> None:
    if not 0 <= h <= n - 1:
        raise ValueError("need 0 <= h <= n-1")


def _variance_from_sums(sums, count: int, mean: int) -> Fraction:
    total = sum((int(s) - mean) ** 2 for s in sums)
    return Fraction(total, count)


def ff_variance_enumerate(q: int, k: int, n: int, h: int,
                          table: Optional[IrreducibleTable] = None) -> FFVarianceResult:
    """Variance by factoring every monic polynomial of degree n."""
    _check_q(q)
    _check_nh(n, h)
    if q ** n > ENUM_BUDGET:
        raise ValueError("q^n exceeds the enumeration budget")
    table = table or build_irreducibles(q, n)
    block = q ** (h + 1)
    nblocks = q ** (n - h - 1)
    sums = [0] * nblocks
    for idx in range(q ** n):
        sums[idx // block] += ff_dk(monic_from_index(idx, n, q), k, table)
    main = block * comb(n + k - 1, k - 1)
    lhs = _variance_from_sums(sums, nblocks, main)
    return FFVarianceResult(q, k, n, h, lhs, _rmt_value(k, n, h), main)


# ---------------------------------------------------------------------------
# exact convolution route


class _Dist:
    """Nonnegative integer vector on the group G: ``const + dense`` entrywise."""

    def __init__(self, size: int, const: int = 0, dense: Optional[np.ndarray] = None):
        self.size = size
        self.const = const
        self.dense = dense

    def total(self) -> int:
        t = self.const * self.size
        if self.dense is not None:
            t += int(self.dense.sum())
        return t

    def __add__(self, other: "_Dist") -> "_Dist":
        if self.dense is None:
            dense = other.dense
        elif other.dense is None:
            dense = self.dense
        else:
            dense = self.dense + other.dense
        return _Dist(self.size, self.const + other.const, dense)

    def values(self) -> np.ndarray:
        v = np.full(self.size, self.const, dtype=np.int64)
        if self.dense is not None:
            v += self.dense
        return v


class _TruncatedGroup:
    """Power series ``1 + c_1 x + ... + c_L x^L`` over F_q under multiplication."""

    def __init__(self, q: int, L: int):
        self.q, self.L = q, L
        self.size = q ** L
        self.weights = q ** np.arange(L, dtype=np.int64)

    def digits(self, idx: np.ndarray) -> np.ndarray:
        out = np.empty((len(idx), self.L), dtype=np.int64)
        rest = idx.copy()
        for t in range(self.L):
            rest, out[:, t] = np.divmod(rest, self.q)
        return out

    def product_index(self, u: np.ndarray, v_digits: np.ndarray) -> np.ndarray:
        """Index of ``u * v`` for one element u (digit vector) and many v."""
        q, L = self.q, self.L
        idx = np.zeros(len(v_digits), dtype=np.int64)
        for t in range(1, L + 1):
            c = v_digits[:, t - 1].copy()
            for s in range(1, t + 1):
                if u[s - 1]:
                    vs = 1 if s == t else v_digits[:, t - s - 1]
                    c += u[s - 1] * vs
            idx += (c % q) * self.weights[t - 1]
        return idx

    def convolve(self, a: _Dist, b: _Dist) -> _Dist:
        # (ca + da) * (cb + db): a constant part spreads any vector uniformly
        sum_da = int(a.dense.sum()) if a.dense is not None else 0
        sum_db = int(b.dense.sum()) if b.dense is not None else 0
        const = a.const * b.const * self.size + a.const * sum_db + b.const * sum_da
        if a.dense is None or b.dense is None:
            return _Dist(self.size, const, None)
        ia = np.flatnonzero(a.dense)
        ib = np.flatnonzero(b.dense)
        if len(ia) > len(ib):
            a, b, ia, ib = b, a, ib, ia
        wb = b.dense[ib].astype(np.float64)
        db = self.digits(ib)
        da = self.digits(ia)
        acc = np.zeros(self.size, dtype=np.float64)
        if float(a.dense.sum()) * float(b.dense.sum()) >= FLOAT_EXACT:
            raise OverflowError("counts too large for exact float accumulation")
        pending_i, pending_w, pending_n = [], [], 0
        for row, i in zip(da, ia):
            pending_i.append(self.product_index(row, db))
            pending_w.append(wb * float(a.dense[i]))
            pending_n += len(ib)
            if pending_n >= 4_000_000:
                acc += np.bincount(np.concatenate(pending_i), np.concatenate(pending_w),
                                   minlength=self.size)
                pending_i, pending_w, pending_n = [], [], 0
        if pending_i:
            acc += np.bincount(np.concatenate(pending_i), np.concatenate(pending_w),
                               minlength=self.size)
        return _Dist(self.size, const, np.rint(acc).astype(np.int64))


def interval_sums(q: int, k: int, n: int, h: int) -> np.ndarray:
    """Sum of d_k over each of the ``q^{n-h-1}`` short intervals (any order)."""
    _check_q(q)
    _check_nh(n, h)
    L = n - h - 1
    G = _TruncatedGroup(q, L)
    if q ** n * comb(n + k - 1, k - 1) >= FLOAT_EXACT:
        raise OverflowError("total count exceeds exact integer range")

    def single(m: int) -> _Dist:
        # reversed monic of degree m is 1 + (m free coefficients) truncated at L
        if m >= L:
            return _Dist(G.size, q ** (m - L), None)
        dense = np.zeros(G.size, dtype=np.int64)
        dense[: q ** m] = 1
        return _Dist(G.size, 0, dense)

    base = [single(m) for m in range(n + 1)]
    layer = base
    for _ in range(k - 1):
        nxt = []
        for t in range(n + 1):
            acc = _Dist(G.size)
            for m in range(t + 1):
                acc = acc + G.convolve(layer[t - m], base[m])
            nxt.append(acc)
        layer = nxt
    return layer[n].values()


def ff_variance(q: int, k: int, n: int, h: int) -> FFVarianceResult:
    """Exact short-interval variance of d_k over monic polynomials of degree n."""
    sums = interval_sums(q, k, n, h)
    main = q ** (h + 1) * comb(n + k - 1, k - 1)
    total = int(sums.sum())
    if total != q ** n * comb(n + k - 1, k - 1):
        raise ArithmeticError("interval sums do not add up to the total divisor count")
    lhs = _variance_from_sums(sums.tolist(), len(sums), main)
    return FFVarianceResult(q, k, n, h, lhs, _rmt_value(k, n, h), main)


def ff_variance_sweep(k: int, n: int, h: int, q_list: Sequence[int]) -> List[dict]:
    rows = []
    for q in q_list:
        res = ff_variance(q, k, n, h)
        norm = res.normalized
        diff = abs(norm - res.rmt_value)
        rows.append({"q": q, "k": k, "n": n, "h": h,
                     "lhs": format_rational(res.lhs),
                     "normalized": float(norm), "rmt": res.rmt_value,
                     "scaled_diff": float(diff) * q ** 0.5})
    return rows


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()
