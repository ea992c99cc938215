"""Exact secular-coefficient moments over U(N) through the Schur basis.

The secular coefficient Sc_j of a unitary matrix is the elementary symmetric
polynomial e_j of its eigenvalues.  Products of e_j's expand in Schur
functions by the (dual) Pieri rule, and Schur functions with at most N rows
are orthonormal for Haar measure on U(N).  So the Haar average of
``|sum of products|^2`` is the sum of squared Schur coefficients.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, Iterator, List, Tuple

Partition = Tuple[int, ...]

#: partitions of n beyond this are not enumerated
MAX_WEIGHT = 200


class SchurVector:
    """Sparse integer combination of Schur functions with at most ``rows`` rows."""

    __slots__ = ("rows", "entries")

    def __init__(self, rows: int, entries: Dict[Partition, int] = None):
        self.rows = rows
        clean = {}
        for lam, c in (entries or {}).items():
            if c and len(lam) <= rows:
                clean[tuple(lam)] = c
        self.entries: Dict[Partition, int] = clean

    @classmethod
    def one(cls, rows: int) -> "SchurVector":
        return cls(rows, {(): 1})

    def __add__(self, other: "SchurVector") -> "SchurVector":
        out = dict(self.entries)
        for lam, c in other.entries.items():
            out[lam] = out.get(lam, 0) + c
        return SchurVector(self.rows, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, SchurVector) and (self.rows, self.entries) == (
            other.rows, other.entries)

    def __repr__(self) -> str:
        return f"SchurVector(rows={self.rows}, {self.entries})"

    def norm2(self) -> int:
        """Squared norm in the orthonormal Schur basis."""
        return sum(c * c for c in self.entries.values())

    def times_e(self, j: int) -> "SchurVector":
        """Multiply by e_j (add a vertical strip of size j), pruning rows > bound."""
        out: Dict[Partition, int] = {}
        for lam, c in self.entries.items():
            for mu in vertical_strips(lam, j, self.rows):
                out[mu] = out.get(mu, 0) + c
        return SchurVector(self.rows, out)


def vertical_strips(lam: Partition, j: int, max_rows: int) -> Iterator[Partition]:
    """Partitions ``mu`` with ``mu / lam`` a vertical j-strip and ``len(mu) <= max_rows``."""
    length = min(len(lam) + j, max_rows)
    base = list(lam) + [0] * (length - len(lam))
    if j > length:
        return
    picked = [False] * length

    def rec(i: int, left: int) -> Iterator[Partition]:
        if left == 0:
            mu = [base[t] + picked[t] for t in range(length)]
            while mu and mu[-1] == 0:
                mu.pop()
            yield tuple(mu)
            return
        if length - i < left:
            return
        # row i may grow only if it stays weakly below the (possibly grown) row i-1
        can_grow = i == 0 or base[i] < base[i - 1] or picked[i - 1]
        if can_grow:
            picked[i] = True
            yield from rec(i + 1, left - 1)
            picked[i] = False
        # skipping an empty row leaves every later (empty) row unable to grow
        if base[i] == 0:
            return
        yield from rec(i + 1, left)

    yield from rec(0, j)


@lru_cache(maxsize=None)
def composition_sum(t: int, m: int, N: int) -> SchurVector:
    """Schur expansion of ``sum e_{j_1}...e_{j_t}`` over j's summing to m, each <= N."""
    if t == 0:
        return SchurVector.one(N) if m == 0 else SchurVector(N)
    out = SchurVector(N)
    for j in range(0, min(N, m) + 1):
        prev = composition_sum(t - 1, m - j, N)
        if prev.entries:
            out = out + prev.times_e(j)
    return out


def _check_args(k: int, n: int, N: int) -> None:
    if k < 1 or N < 1:
        raise ValueError("need k >= 1 and N >= 1")
    if n > MAX_WEIGHT:
        raise ValueError(f"n={n} exceeds the partition enumeration budget {MAX_WEIGHT}")


def exact_Ik(k: int, n: int, N: int) -> int:
    """Haar average of ``|sum_{j_1+..+j_k=n, j_i<=N} Sc_{j_1}...Sc_{j_k}|^2`` over U(N)."""
    if n < 0 or n > k * N:
        return 0
    _check_args(k, n, N)
    return composition_sum(k, n, N).norm2()


def exact_Itilde(k: int, m: int, N: int) -> int:
    """Same average with the constraint ``j_1 + ... + j_k <= m``.

    Different total degrees are orthogonal, so this is a sum of ``exact_Ik``.
    """
    return sum(exact_Ik(k, n, N) for n in range(0, min(m, k * N) + 1))


def exact_Itilde_direct(k: int, m: int, N: int) -> int:
    """``exact_Itilde`` computed as one squared norm (orthogonality not assumed)."""
    _check_args(k, min(m, k * N), N)
    vec = SchurVector(N)
    for n in range(0, min(m, k * N) + 1):
        vec = vec + composition_sum(k, n, N)
    return vec.norm2()


def fN_coeffs(k: int, N: int) -> List[int]:
    """Coefficients of the degree-kN polynomial F_N(s) = sum_n I_k(n, N) s^n."""
    return [exact_Ik(k, n, N) for n in range(k * N + 1)]
