"""The piecewise polynomials M_k, gamma_k and their building blocks P_{r,k}.

``P_{r,k}(alpha)`` is a k-fold contour integral whose integrand has poles of
order k at ``w_i = -1`` (first r variables) and ``w_i = 0`` (the rest).  After
the shift ``w_i = -1 + u_i`` resp. ``w_i = v_i`` each residue is the
coefficient of ``u_i^{k-1}`` (resp. ``v_i^{k-1}``), so a series truncated at
degree ``k - 1`` in every variable carries everything needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .exactnum import (MultiSeries, PiecewisePoly, Poly, coefficient_of_product,
                       pw_add, pw_convolve, pw_differentiate)

#: largest k accepted by default; raise it if you have the patience
K_CAP = 5


def _check_k(k: int, cap: Optional[int]) -> None:
    cap = K_CAP if cap is None else cap
    if k < 1:
        raise ValueError("k must be a positive integer")
    if k > cap:
        raise ValueError(f"k={k} exceeds the implementation cap {cap}")


def barnes_g(n: int) -> int:
    """Barnes G at a positive integer: ``G(n) = prod_{i=1}^{n-2} i!``."""
    if n < 1:
        raise ValueError("only positive integers are supported")
    out = 1
    for i in range(1, n - 1):
        out *= factorial(i)
    return out


def compute_gk(k: int) -> Fraction:
    """Geometric constant ``G(1+k)^2 / G(1+2k)`` as an exact rational."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Fraction(barnes_g(1 + k) ** 2, barnes_g(1 + 2 * k))


@dataclass(frozen=True)
class ExactConstants:
    k: int
    g_k: Fraction
    factorials: Tuple[int, ...]
    barnes: Tuple[int, ...]

    @classmethod
    def build(cls, k: int) -> "ExactConstants":
        return cls(k, compute_gk(k), tuple(factorial(i) for i in range(2 * k + 1)),
                   tuple(barnes_g(n) for n in range(1, 2 * k + 2)))


def _vandermonde_and_poles(r: int, k: int) -> MultiSeries:
    """Ordered Vandermonde times the analytic parts of the pole factors."""
    cap = k - 1
    centers = [-1] * r + [0] * (k - r)
    s = MultiSeries.constant(k, cap)
    for i in range(k):
        for j in range(k):
            if i != j:
                # w_i - w_j with w_i = center_i + x_i
                s = s * MultiSeries.linear(k, cap, centers[i] - centers[j], {i: 1, j: -1})
    for i in range(k):
        if i < r:
            # w_i^{-k} = (u_i - 1)^{-k}
            s = s * MultiSeries.binomial(k, cap, i, -1, 1, -k)
        else:
            # (w_i + 1)^{-k} = (1 + v_i)^{-k}
            s = s * MultiSeries.binomial(k, cap, i, 1, 1, -k)
    return s


def _power_of_sum(r: int, k: int) -> MultiSeries:
    """``(alpha - r + sum x_i)^{k^2}`` truncated at degree k-1 per variable."""
    cap, n = k - 1, k * k
    shifted = Poly((-r, 1))
    pow_cache: Dict[int, Poly] = {}
    terms = {}
    for e in itertools.product(range(cap + 1), repeat=k):
        rest = n - sum(e)
        coef = factorial(n) // factorial(rest)
        for ei in e:
            coef //= factorial(ei)
        if rest not in pow_cache:
            pow_cache[rest] = shifted ** rest
        terms[e] = pow_cache[rest] * coef
    return MultiSeries(k, cap, terms)


@lru_cache(maxsize=None)
def compute_P(r: int, k: int, cap: Optional[int] = None) -> Poly:
    """``P_{r,k}(alpha)`` by exact residue extraction (zero for ``r > k``)."""
    _check_k(k, cap)
    if r < 0:
        raise ValueError("r must be >= 0")
    if r > k:
        return Poly()
    target = (k - 1,) * k
    coeff = coefficient_of_product(_vandermonde_and_poles(r, k), _power_of_sum(r, k), target)
    return coeff / factorial(k)


@lru_cache(maxsize=None)
def compute_Mk(k: int, cap: Optional[int] = None) -> PiecewisePoly:
    """M_k as a piecewise polynomial on the integer breakpoints 0..k."""
    _check_k(k, cap)
    scale = Fraction(1, factorial(k * k))
    partial = Poly()
    pieces = []
    for ell in range(k + 1):
        partial = partial + compute_P(ell, k, cap) * comb(k, ell)
        pieces.append(partial * scale)
    tail = pieces.pop()
    if tail.degree > 0:
        raise ArithmeticError(f"tail of M_{k} is not constant: {tail}")
    return PiecewisePoly(range(k + 1), pieces, tail)


@lru_cache(maxsize=None)
def compute_gamma(k: int, cap: Optional[int] = None) -> PiecewisePoly:
    """gamma_k as the piecewise derivative of M_k."""
    return pw_differentiate(compute_Mk(k, cap))


def vandermonde_squared_monomials(k: int) -> Dict[Tuple[int, ...], int]:
    """Monomial expansion of ``prod_{i<j} (w_i - w_j)^2``."""
    poly: Dict[Tuple[int, ...], int] = {(0,) * k: 1}
    for i in range(k):
        for j in range(i + 1, k):
            for _ in range(2):
                nxt: Dict[Tuple[int, ...], int] = {}
                for e, c in poly.items():
                    for var, sign in ((i, 1), (j, -1)):
                        e2 = list(e)
                        e2[var] += 1
                        e2 = tuple(e2)
                        nxt[e2] = nxt.get(e2, 0) + sign * c
                poly = {e: c for e, c in nxt.items() if c}
    return poly


@lru_cache(maxsize=None)
def _monomial_density(a: int) -> PiecewisePoly:
    return PiecewisePoly.indicator(0, 1, Poly.monomial(a))


@lru_cache(maxsize=None)
def _density_product(exps: Tuple[int, ...]) -> PiecewisePoly:
    """Convolution of ``x^a 1[0,1)`` over the sorted exponent tuple ``exps``."""
    if len(exps) == 1:
        return _monomial_density(exps[0])
    return pw_convolve(_density_product(exps[:-1]), _monomial_density(exps[-1]))


def gamma_oracle(k: int, cap: Optional[int] = None) -> PiecewisePoly:
    """gamma_k straight from its delta-function integral over the unit cube.

    Independent of the residue route: the squared Vandermonde is expanded
    into monomials and each monomial density is convolved k-fold.
    """
    _check_k(k, cap)
    total = PiecewisePoly()
    grouped: Dict[Tuple[int, ...], int] = {}
    for e, c in vandermonde_squared_monomials(k).items():
        key = tuple(sorted(e))
        grouped[key] = grouped.get(key, 0) + c
    for key, c in sorted(grouped.items()):
        if c:
            total = pw_add(total, _density_product(key).scale(c))
    return total.scale(Fraction(1, factorial(k) * barnes_g(1 + k) ** 2))


def vanishing_order(k: int, r: int) -> int:
    """Multiplicity of the root ``alpha = r`` of ``P_{r,k}``."""
    if not 0 <= r <= k:
        raise ValueError("need 0 <= r <= k")
    return compute_P(r, k).root_multiplicity(r)


def smoothness_order(f: PiecewisePoly, b) -> int:
    """Largest m with derivatives 0..m matching across breakpoint b (-1 on a jump)."""
    b = Fraction(b)
    if b not in f.breakpoints:
        raise ValueError(f"{b} is not a breakpoint")
    i = f.breakpoints.index(b)
    left = f.pieces[i - 1] if i > 0 else Poly()
    right = f.pieces[i] if i < len(f.pieces) else f.tail
    return (right - left).root_multiplicity(b) - 1


def smoothness_bound(k: int, ell: int) -> int:
    return k * k - 2 * k * ell + 2 * ell * ell - 1


@dataclass
class MomentPolyFamily:
    k: int
    P: List[Poly]
    Mk: PiecewisePoly
    gamma: PiecewisePoly

    @classmethod
    def build(cls, k: int) -> "MomentPolyFamily":
        return cls(k, [compute_P(r, k) for r in range(k + 1)], compute_Mk(k), compute_gamma(k))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "P": [p.to_json() for p in self.P],
            "Mk": self.Mk.to_json(),
            "gamma": self.gamma.to_json(),
        }


# ---------------------------------------------------------------------------
# k = 3 uniqueness

#: 9! M_3 as printed for 1 < alpha <= 2, lowest degree first
M3_MIDDLE = Poly([1479, -8343, 19764, -25452, 19278, -8694, 2268, -324, 27, -2])
M3_UPPER = Poly([-19641, 59049, -78732, 61236, -30618, 10206, -2268, 324, -27, 1])
M2_MIDDLE = Poly([-14, 32, -24, 8, -1])


def solve_rational(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Exact Gauss-Jordan elimination.

    Returns ``(rank, consistent, solution)``; ``solution`` is a particular
    solution (free variables set to zero) or ``None`` when inconsistent.
    """
    m = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(rows, rhs)]
    ncols = len(m[0]) - 1 if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [v / pv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    consistent = all(row[-1] == 0 for row in m[r:])
    if not consistent:
        return r, False, None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = m[i][-1]
    return r, True, sol


@dataclass
class UniquenessReport:
    solution_space_dim: Optional[int]
    consistent: bool
    witness: Optional[PiecewisePoly]
    middle: Optional[Poly]
    rank: int
    equations: int = field(default=0)


def uniqueness_check_k3(perturb: Optional[int] = None) -> UniquenessReport:
    """Solve for the 1 <= alpha < 2 piece of 9! M_3 from symmetry and C^4 matching.

    Unknowns are the 10 coefficients of a degree-9 polynomial f.  Equations:
    ``f(a) + f(3 - a) = 42`` coefficientwise, and ``f^{(j)}(1) = (a^9)^{(j)}(1)``
    for j = 0..4.  ``perturb`` adds 1 to the right-hand side of that equation
    index (negative control).
    """
    deg = 9
    basis = [Poly.monomial(i) for i in range(deg + 1)]
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    # symmetry: coefficient of a^m in f(a) + f(3 - a) - 42
    sym = [b + b.compose_linear(3, -1) for b in basis]
    for m in range(deg + 1):
        rows.append([s.coeffs[m] if m < len(s.coeffs) else Fraction(0) for s in sym])
        rhs.append(Fraction(42 if m == 0 else 0))
    low = Poly.monomial(9)
    for j in range(5):
        rows.append([b.derivative(j)(1) for b in basis])
        rhs.append(low.derivative(j)(1))
    if perturb is not None:
        rhs[perturb] += 1
    rank, ok, sol = solve_rational(rows, rhs)
    if not ok:
        return UniquenessReport(None, False, None, None, rank, len(rows))
    middle = Poly(sol)
    lower_reflect = Poly.const(42) - low.compose_linear(3, -1)
    witness = PiecewisePoly([0, 1, 2, 3], [low, middle, lower_reflect], Poly.const(42))
    return UniquenessReport(deg + 1 - rank, True, witness, middle, rank, len(rows))
