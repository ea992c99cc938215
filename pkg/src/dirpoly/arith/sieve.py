"""Segmented sieve for the k-fold divisor function."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from math import comb, isqrt
from typing import Iterator, Optional, Tuple

import numpy as np

#: entries held in memory at once by :func:`sieve_dk`
MEMORY_BUDGET = 2 * 10 ** 8
SEGMENT = 1 << 22


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(n) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.flatnonzero(flags).astype(np.int64)


def dk_segment(k: int, lo: int, hi: int, primes: Optional[np.ndarray] = None) -> np.ndarray:
    """``d_k(n)`` for ``lo <= n < hi`` by multiplicative fill over small primes."""
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    size = hi - lo
    vals = np.ones(size, dtype=np.int64)
    if size == 0:
        return vals
    rem = np.arange(lo, hi, dtype=np.int64)
    if primes is None:
        primes = primes_upto(isqrt(hi - 1))
    max_e = max(1, (hi - 1).bit_length())
    binom = np.array([comb(e + k - 1, k - 1) for e in range(max_e + 1)], dtype=np.int64)
    for p in primes.tolist():
        if p * p > hi - 1:
            break
        start = (-lo) % p
        if start >= size:
            continue
        sl = slice(start, size, p)
        e = np.ones(len(range(start, size, p)), dtype=np.int64)
        pe = p * p
        while pe < hi:
            s2 = (-lo) % pe
            if s2 < size:
                e[(s2 - start) // p::pe // p] += 1
            pe *= p
        vals[sl] *= binom[e]
        rem[sl] //= p ** e
    vals[rem > 1] *= k
    return vals


@dataclass
class SieveTable:
    """``d_k(n)`` for ``start <= n < start + len(values)``."""
    k: int
    start: int
    values: np.ndarray
    _digest: Optional[str] = field(default=None, repr=False)

    @property
    def X(self) -> int:
        return self.start + len(self.values) - 1

    def __getitem__(self, n: int) -> int:
        if not self.start <= n <= self.X:
            raise IndexError(n)
        return int(self.values[n - self.start])

    def covers(self, lo: int, hi: int) -> bool:
        return self.start <= lo and hi <= self.X

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Values for ``lo <= n <= hi``."""
        return self.values[lo - self.start: hi - self.start + 1]

    def checksum(self) -> str:
        if self._digest is None:
            self._digest = hashlib.sha256(self.values.tobytes()).hexdigest()[:16]
        return self._digest


def sieve_dk(k: int, X: int, start: int = 1) -> SieveTable:
    """Table of ``d_k(n)`` for ``start <= n <= X``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if X - start + 1 > MEMORY_BUDGET:
        raise MemoryError(f"table of {X - start + 1} entries exceeds the budget")
    primes = primes_upto(isqrt(X))
    parts = [dk_segment(k, a, min(a + SEGMENT, X + 1), primes)
             for a in range(start, X + 1, SEGMENT)]
    values = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return SieveTable(k, start, values)


def iter_dk(k: int, lo: int, hi: int, segment: int = SEGMENT) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield ``(a, d_k(a..b-1))`` blocks covering ``lo <= n < hi``."""
    primes = primes_upto(isqrt(max(hi - 1, 1)))
    for a in range(lo, hi, segment):
        b = min(a + segment, hi)
        yield a, dk_segment(k, a, b, primes)
