"""Laurent data of zeta at s = 1 and the residue main terms built from it."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import List, Optional, Sequence

import mpmath
import numpy as np

# Stieltjes constants gamma_0..gamma_8, 32 significant digits.  Derived by
# Euler-Maclaurin summation of sum_{m<=M} log(m)^n/m - log(M)^{n+1}/(n+1)
# at M = 200 with 12 Bernoulli corrections (45-digit working precision);
# agreement with mpmath.stieltjes is better than 1e-40 for every n.
STIELTJES = (
    "0.57721566490153286060651209008240",
    "-0.072815845483676724860586375874901",
    "-0.0096903631928723184845303860352125",
    "0.0020538344203033458661600465427534",
    "0.0023253700654673000574681701775261",
    "0.00079332381730106270175333487744444",
    "-0.00023876934543019960987242184190800",
    "-0.00052728956705775104607409750547886",
    "-0.00035212335380303950960205216500121",
)

DPS = 30


@dataclass(frozen=True)
class ZetaLaurent:
    """Stieltjes constants as mpmath numbers; ``order`` is how many are used."""
    stieltjes: tuple
    order: int

    @classmethod
    def default(cls) -> "ZetaLaurent":
        with mpmath.workdps(DPS + 5):
            vals = tuple(mpmath.mpf(s) for s in STIELTJES)
        return cls(vals, len(vals))

    def zeta_power(self, k: int, terms: int) -> List:
        """``z_j`` with ``zeta(s)^k = (s-1)^{-k} sum_j z_j (s-1)^j``, j < terms."""
        if terms - 1 > self.order:
            raise ValueError(f"need {terms - 1} Stieltjes constants, have {self.order}")
        with mpmath.workdps(DPS + 5):
            # (s-1) zeta(s) = 1 + sum_n (-1)^n gamma_n / n! (s-1)^{n+1}
            base = [mpmath.mpf(1)] + [
                (-1) ** n * self.stieltjes[n] / factorial(n) for n in range(terms - 1)]
            out = [mpmath.mpf(1)] + [mpmath.mpf(0)] * (terms - 1)
            for _ in range(k):
                out = _series_mul(out, base, terms)
        return out


def _series_mul(a: Sequence, b: Sequence, terms: int) -> List:
    out = [mpmath.mpf(0)] * terms
    for i, x in enumerate(a[:terms]):
        for j, y in enumerate(b[:terms - i]):
            out[i + j] += x * y
    return out


def residue_main_term(k: int, laurent: Optional[ZetaLaurent] = None,
                      q: Optional[int] = None) -> List[float]:
    """Coefficients (in powers of L = log X) of Q with Res = X * Q(log X).

    The residue is of ``zeta(s)^k X^s / s`` at s = 1, or with the extra factor
    ``(1 - q^{-s})^k`` when ``q`` is given.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    laurent = laurent or ZetaLaurent.default()
    if k > 6 and k - 2 >= laurent.order:
        raise ValueError("k exceeds the stored Laurent order")
    with mpmath.workdps(DPS + 5):
        z = laurent.zeta_power(k, k)
        inv_s = [mpmath.mpf((-1) ** j) for j in range(k)]
        series = _series_mul(z, inv_s, k)
        if q is not None:
            lq = mpmath.log(q)
            # 1 - q^{-s} = 1 - q^{-1} exp(-(s-1) log q)
            fac = [(1 if j == 0 else 0) - mpmath.mpf(1) / q * (-lq) ** j / factorial(j)
                   for j in range(k)]
            powk = [mpmath.mpf(1)] + [mpmath.mpf(0)] * (k - 1)
            for _ in range(k):
                powk = _series_mul(powk, fac, k)
            series = _series_mul(series, powk, k)
        # coefficient of (s-1)^{k-1} in series * exp((s-1) L)
        coeffs = [series[k - 1 - c] / factorial(c) for c in range(k)]
        return [float(c) for c in coeffs]


def main_term(y, coeffs: Sequence[float]):
    """``y * Q(log y)`` for scalar or array y."""
    y = np.asarray(y, dtype=float)
    L = np.log(y)
    acc = np.zeros_like(y)
    for c in reversed(coeffs):
        acc = acc * L + c
    return y * acc


def dirichlet_residue(t: np.ndarray, N: float, k: int,
                      laurent: Optional[ZetaLaurent] = None) -> np.ndarray:
    """``Res_{w=1} zeta(w)^k N^{w-s} / (w - s)`` at ``s = 1/2 + i t``."""
    laurent = laurent or ZetaLaurent.default()
    z = [float(v) for v in laurent.zeta_power(k, k)]
    s = 0.5 + 1j * np.asarray(t, dtype=float)
    one_minus = 1.0 - s
    logN = np.log(N)
    acc = np.zeros_like(s)
    for a in range(k):
        for b in range(k - a):
            c = k - 1 - a - b
            acc = acc + z[a] * logN ** b / factorial(b) * (-1) ** c / one_minus ** (c + 1)
    return np.exp(one_minus * logN) * acc
