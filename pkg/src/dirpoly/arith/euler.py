"""The arithmetic factor a_k as a truncated Euler product with a tail estimate."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import List

import mpmath

from .sieve import primes_upto

DPS = 30
#: number of terms of the per-prime log expansion carried into the tail
TAIL_TERMS = 12


@dataclass(frozen=True)
class EulerProduct:
    value: mpmath.mpf
    pmax: int
    tail_bound: float

    def __float__(self) -> float:
        return float(self.value)


def local_factor(k: int, x):
    """``(1-x)^{(k-1)^2} sum_j C(k-1,j)^2 x^j`` with ``x = 1/p``."""
    s = sum(comb(k - 1, j) ** 2 * x ** j for j in range(k))
    return (1 - x) ** ((k - 1) ** 2) * s


def log_factor_coeffs(k: int, terms: int = TAIL_TERMS) -> List[Fraction]:
    """``c_m`` with ``log local_factor(k, x) = sum_{m>=1} c_m x^m`` (exact)."""
    # log(1-x) part
    c = [Fraction(0)] * (terms + 1)
    for m in range(1, terms + 1):
        c[m] -= Fraction((k - 1) ** 2, m)
    # log B(x), B = sum_j C(k-1,j)^2 x^j, via (log B)' = B'/B
    B = [Fraction(comb(k - 1, j) ** 2) if j < k else Fraction(0) for j in range(terms + 1)]
    dB = [(j + 1) * B[j + 1] for j in range(terms)]
    ratio = [Fraction(0)] * terms
    for n in range(terms):
        acc = dB[n] - sum(ratio[i] * B[n - i] for i in range(n))
        ratio[n] = acc / B[0]
    for m in range(1, terms + 1):
        c[m] += ratio[m - 1] / m
    return c


@lru_cache(maxsize=None)
def compute_ak(k: int, pmax: int = 10 ** 6) -> EulerProduct:
    """``a_k`` from the exact product over ``p <= pmax`` and a prime-zeta tail.

    For ``p > pmax`` the log factors are summed through
    ``sum_m c_m (P(m) - sum_{p<=pmax} p^{-m})`` with P the prime zeta function.
    The linear term ``c_1`` vanishes.  The terms beyond ``TAIL_TERMS`` are
    bounded by ``sum_m |c_m| pmax^{1-m}``, which is recorded.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if pmax < 1000:
        raise ValueError("pmax must be >= 1000")
    if k == 1:
        return EulerProduct(mpmath.mpf(1), pmax, 0.0)
    primes = primes_upto(pmax).tolist()
    c = log_factor_coeffs(k)
    assert c[1] == 0
    with mpmath.workdps(DPS):
        total = mpmath.fsum(mpmath.log(local_factor(k, mpmath.mpf(1) / p)) for p in primes)
        tail = mpmath.mpf(0)
        for m in range(2, TAIL_TERMS + 1):
            if c[m] == 0:
                continue
            partial = mpmath.fsum(mpmath.mpf(p) ** (-m) for p in primes)
            beyond = mpmath.primezeta(m) - partial
            tail += mpmath.mpf(c[m].numerator) / c[m].denominator * beyond
        value = mpmath.exp(total + tail)
    extra = log_factor_coeffs(k, 2 * TAIL_TERMS)[TAIL_TERMS + 1:]
    bound = sum(abs(float(cm)) * pmax ** (1.0 - m)
                for m, cm in enumerate(extra, start=TAIL_TERMS + 1))
    return EulerProduct(value, pmax, bound)


def local_series(k: int, q: int, terms: int = 200):
    """``(1 - 1/q)^{k^2} sum_e C(e+k-1,k-1)^2 q^{-e}``, the local d_k^2 factor."""
    with mpmath.workdps(DPS):
        x = mpmath.mpf(1) / q
        s = mpmath.fsum(comb(e + k - 1, k - 1) ** 2 * x ** e for e in range(terms))
        return (1 - x) ** (k * k) * s


def compute_ak_q(k: int, q: int, pmax: int = 10 ** 6) -> EulerProduct:
    """``a_k(q)``: the factor at ``p = q`` replaced by ``(1 - 1/q)^{k^2}``."""
    from ..ffield import is_prime
    if not is_prime(q):
        raise ValueError("q must be prime")
    base = compute_ak(k, max(pmax, q))
    with mpmath.workdps(DPS):
        x = mpmath.mpf(1) / q
        value = base.value * (1 - x) ** (k * k) / local_factor(k, x)
    return EulerProduct(value, base.pmax, base.tail_bound)


def ak_q_closed_k2(q: int):
    """Closed form of ``a_2(q)``: ``(1-1/q)^4 / (zeta(2) (1 - 1/q^2))``."""
    with mpmath.workdps(DPS):
        x = mpmath.mpf(1) / q
        return (1 - x) ** 4 / (mpmath.zeta(2) * (1 - x * x))
