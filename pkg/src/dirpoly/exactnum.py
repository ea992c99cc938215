"""Exact rational polynomials, piecewise polynomials and truncated power series.

All coefficients are :class:`fractions.Fraction`.  Every object here is
immutable once built, so values can be shared freely between threads.

Piecewise polynomials use half-open pieces ``[b_i, b_{i+1})``, a tail on
``[b_m, inf)`` and the value 0 to the left of ``b_0``.  Construction puts the
function in canonical form (zero head pieces dropped, equal neighbours
merged) so that ``==`` is exact equality of functions.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

Rational = Fraction
Number = Union[int, Fraction]

__all__ = [
    "Rational", "Poly", "PiecewisePoly", "MultiSeries", "DiscontinuityError",
    "poly_arith", "pw_eval", "pw_differentiate", "pw_integrate", "pw_convolve",
    "pw_add", "series_mul", "coefficient_of_product",
    "format_rational", "parse_rational", "rational_to_json",
]


class DiscontinuityError(ValueError):
    """A piecewise polynomial jumps at a breakpoint where continuity is required."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact coefficients")
    return Fraction(x)


def format_rational(x: Number) -> str:
    """Serialize as ``"num/den"``, or ``"num"`` when the denominator is 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rational_to_json(x: Number) -> Union[int, str]:
    """JSON form: plain integer when the denominator is 1, else ``"num/den"``."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else format_rational(x)


def parse_rational(s: Union[str, int]) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(s.strip())


class Poly:
    """Univariate polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        c = [_frac(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(c)
        self._hash = None

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def const(cls, c: Number) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, n: int, c: Number = 1) -> "Poly":
        return cls([0] * n + [c])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self) -> str:
        return f"Poly([{', '.join(format_rational(c) for c in self.coeffs)}])"

    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([a[i] + b[i] if i < len(b) else a[i] for i in range(len(a))])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs])
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, c: Number) -> "Poly":
        return Poly([a / c for a in self.coeffs])

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result, base = Poly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x: Number) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self, m: int = 1) -> "Poly":
        c = self.coeffs
        for _ in range(m):
            c = tuple(i * c[i] for i in range(1, len(c)))
        return Poly(c)

    def antiderivative(self) -> "Poly":
        return Poly([0] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def compose_linear(self, a: Number, b: Number) -> "Poly":
        """Return ``p(a + b*x)``."""
        lin = Poly((a, b))
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * lin + c
        return acc

    def shift(self, a: Number) -> "Poly":
        """Taylor shift ``p(x + a)``."""
        return self.compose_linear(a, 1)

    def root_multiplicity(self, a: Number) -> int:
        if self.is_zero():
            raise ValueError("the zero polynomial vanishes to infinite order")
        shifted = self.shift(a).coeffs
        m = 0
        while shifted[m] == 0:
            m += 1
        return m

    def to_json(self) -> List[Union[int, str]]:
        return [rational_to_json(c) for c in self.coeffs]


def _as_poly(p) -> Poly:
    if isinstance(p, Poly):
        return p
    if isinstance(p, (int, Fraction)):
        return Poly.const(p)
    raise TypeError(f"cannot treat {type(p).__name__} as a polynomial")


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


class PiecewisePoly:
    """Piecewise polynomial on half-open pieces with a polynomial tail."""

    __slots__ = ("breakpoints", "pieces", "tail")

    def __init__(self, breakpoints: Sequence = (), pieces: Sequence = (), tail=()):
        bps = [_frac(b) for b in breakpoints]
        pcs = [p if isinstance(p, Poly) else Poly(p) for p in pieces]
        tail = tail if isinstance(tail, Poly) else Poly(tail)
        if bps and len(pcs) != len(bps) - 1:
            raise ValueError("need exactly one piece per gap between breakpoints")
        if not bps and (pcs or tail):
            raise ValueError("a nonzero function needs at least one breakpoint")
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        # canonical form: drop zero head pieces, merge equal neighbours
        while pcs and pcs[0].is_zero():
            pcs.pop(0)
            bps.pop(0)
        if not pcs and bps and tail.is_zero():
            bps = []
        # segs[i] is valid from bps[i]; the last one is the tail
        segs = pcs + [tail]
        keep_b: List[Fraction] = bps[:1]
        keep_p: List[Poly] = []
        for i in range(1, len(bps)):
            if segs[i] != segs[i - 1]:
                keep_p.append(segs[i - 1])
                keep_b.append(bps[i])
        self.breakpoints: Tuple[Fraction, ...] = tuple(keep_b)
        self.pieces: Tuple[Poly, ...] = tuple(keep_p)
        self.tail: Poly = tail if bps else Poly()

    # ---- construction helpers -------------------------------------------------
    @classmethod
    def zero(cls) -> "PiecewisePoly":
        return cls()

    @classmethod
    def indicator(cls, a: Number = 0, b: Number = 1, poly: Poly = None) -> "PiecewisePoly":
        """``poly`` (default 1) on ``[a, b)`` and zero elsewhere."""
        return cls((a, b), (poly if poly is not None else Poly.const(1),), ())

    # ---- basic protocol -------------------------------------------------------
    def segments(self) -> List[Tuple[Fraction, Fraction, Poly]]:
        """``(start, end, poly)`` for each bounded piece."""
        b = self.breakpoints
        return [(b[i], b[i + 1], self.pieces[i]) for i in range(len(self.pieces))]

    def piece_at(self, x: Number) -> Poly:
        x = _frac(x)
        b = self.breakpoints
        if not b or x < b[0]:
            return Poly()
        if x >= b[-1]:
            return self.tail
        lo, hi = 0, len(b) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if b[mid] <= x:
                lo = mid
            else:
                hi = mid
        return self.pieces[lo]

    def __call__(self, x: Number) -> Fraction:
        return self.piece_at(x)(_frac(x))

    def is_compact(self) -> bool:
        return self.tail.is_zero()

    def support(self) -> Tuple[Fraction, Fraction]:
        if not self.breakpoints:
            raise ValueError("zero function has empty support")
        if not self.is_compact():
            raise ValueError("support is unbounded")
        return self.breakpoints[0], self.breakpoints[-1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        return (self.breakpoints, self.pieces, self.tail) == (
            other.breakpoints, other.pieces, other.tail)

    def __hash__(self) -> int:
        return hash((self.breakpoints, self.pieces, self.tail))

    def __repr__(self) -> str:
        return f"PiecewisePoly({self.to_json()})"

    def __add__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        return pw_add(self, other)

    def __neg__(self) -> "PiecewisePoly":
        return self.scale(-1)

    def __sub__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        return pw_add(self, other.scale(-1))

    def scale(self, c: Number) -> "PiecewisePoly":
        return PiecewisePoly(self.breakpoints, [p * c for p in self.pieces], self.tail * c)

    def map_pieces(self, fn) -> "PiecewisePoly":
        """Apply ``fn`` to every piece and to the tail."""
        return PiecewisePoly(self.breakpoints, [fn(p) for p in self.pieces], fn(self.tail))

    def reflect(self, c: Number) -> "PiecewisePoly":
        """``x -> f(c - x)`` for a compactly supported ``f``."""
        if not self.is_compact():
            raise ValueError("reflect needs compact support")
        c = _frac(c)
        segs = self.segments()
        bps = [c - b for b in reversed(self.breakpoints)]
        pcs = [p.compose_linear(c, -1) for (_, _, p) in reversed(segs)]
        return PiecewisePoly(bps, pcs, ())

    # ---- interchange format ---------------------------------------------------
    def to_json(self) -> Dict[str, list]:
        return {
            "breakpoints": [rational_to_json(b) for b in self.breakpoints],
            "pieces": [p.to_json() for p in self.pieces],
            "tail": self.tail.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: Union[str, Mapping]) -> "PiecewisePoly":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            [parse_rational(b) for b in obj["breakpoints"]],
            [Poly(parse_rational(c) for c in p) for p in obj["pieces"]],
            Poly(parse_rational(c) for c in obj.get("tail", [])),
        )


def pw_eval(f: PiecewisePoly, x: Number) -> Fraction:
    return f(x)


def pw_add(f: PiecewisePoly, g: PiecewisePoly) -> PiecewisePoly:
    bps = sorted(set(f.breakpoints) | set(g.breakpoints))
    if not bps:
        return PiecewisePoly()
    pieces = [f.piece_at(b) + g.piece_at(b) for b in bps[:-1]]
    return PiecewisePoly(bps, pieces, f.tail + g.tail)


def _left_right(f: PiecewisePoly, i: int) -> Tuple[Poly, Poly]:
    left = f.pieces[i - 1] if i > 0 else Poly()
    right = f.pieces[i] if i < len(f.pieces) else f.tail
    return left, right


def pw_differentiate(f: PiecewisePoly) -> PiecewisePoly:
    """Piecewise derivative of a continuous piecewise polynomial.

    Raises :class:`DiscontinuityError` if ``f`` jumps at any breakpoint,
    including the left end of its support.
    """
    for i, b in enumerate(f.breakpoints):
        left, right = _left_right(f, i)
        if left(b) != right(b):
            raise DiscontinuityError(
                f"jump of {format_rational(right(b) - left(b))} at {format_rational(b)}")
    return f.map_pieces(Poly.derivative)


def pw_integrate(f: PiecewisePoly, a: Number, b: Number) -> Fraction:
    a, b = _frac(a), _frac(b)
    if a > b:
        raise ValueError("need a <= b")
    bps = f.breakpoints
    if not bps:
        return Fraction(0)
    edges = [a] + [x for x in bps if a < x < b] + [b]
    total = Fraction(0)
    for lo, hi in zip(edges, edges[1:]):
        F = f.piece_at(lo).antiderivative()
        total += F(hi) - F(lo)
    return total


def _pair_convolution(a: Fraction, b: Fraction, p: Poly,
                      c: Fraction, d: Fraction, r: Poly) -> PiecewisePoly:
    """Convolution of ``p*1[a,b)`` with ``r*1[c,d)``."""
    # bivariate integrand p(t) r(x - t) as {(i, j): coeff of t^i x^j}
    biv: Dict[Tuple[int, int], Fraction] = {}
    for n, rn in enumerate(r.coeffs):
        if not rn:
            continue
        for j in range(n + 1):
            cj = rn * comb(n, j) * (-1) ** (n - j)
            for m, pm in enumerate(p.coeffs):
                if pm:
                    key = (m + n - j, j)
                    biv[key] = biv.get(key, 0) + pm * cj
    # antiderivative in t
    anti = {(i + 1, j): v / (i + 1) for (i, j), v in biv.items()}

    def at(t0: Fraction, t1: Fraction) -> Poly:
        lin = Poly((t0, t1))
        pows: Dict[int, Poly] = {}
        acc = Poly()
        for (i, j), v in anti.items():
            if i not in pows:
                pows[i] = lin ** i
            acc = acc + pows[i] * Poly.monomial(j, v)
        return acc

    knots = sorted({a + c, a + d, b + c, b + d})
    pieces = []
    for x0, x1 in zip(knots, knots[1:]):
        mid = (x0 + x1) / 2
        lo = (a, 0) if a >= mid - d else (-d, 1)
        hi = (b, 0) if b <= mid - c else (-c, 1)
        lo_v = lo[0] + lo[1] * mid
        hi_v = hi[0] + hi[1] * mid
        if hi_v <= lo_v:
            pieces.append(Poly())
        else:
            pieces.append(at(*hi) - at(*lo))
    return PiecewisePoly(knots, pieces, ())


def pw_convolve(f: PiecewisePoly, g: PiecewisePoly) -> PiecewisePoly:
    """Exact convolution ``(f*g)(x) = int f(t) g(x - t) dt`` of compact pieces."""
    if not (f.is_compact() and g.is_compact()):
        raise ValueError("convolution needs compactly supported inputs (zero tail)")
    out = PiecewisePoly()
    for a, b, p in f.segments():
        if p.is_zero():
            continue
        for c, d, r in g.segments():
            if r.is_zero():
                continue
            out = pw_add(out, _pair_convolution(a, b, p, c, d, r))
    return out


# ---------------------------------------------------------------------------
# truncated multivariate series


Exponent = Tuple[int, ...]


class MultiSeries:
    """Sparse power series in ``nvars`` variables, truncated at ``cap`` per variable.

    Coefficients are :class:`Poly` in a formal symbol (alpha).
    """

    __slots__ = ("nvars", "cap", "terms")

    def __init__(self, nvars: int, cap: int, terms: Mapping[Exponent, object] = ()):
        self.nvars = nvars
        self.cap = cap
        clean: Dict[Exponent, Poly] = {}
        for e, c in dict(terms).items():
            e = tuple(e)
            if len(e) != nvars:
                raise ValueError("exponent length does not match nvars")
            if max(e, default=0) > cap:
                continue
            c = _as_poly(c)
            if c:
                clean[e] = c
        self.terms: Dict[Exponent, Poly] = clean

    @classmethod
    def constant(cls, nvars: int, cap: int, c=1) -> "MultiSeries":
        return cls(nvars, cap, {(0,) * nvars: c})

    @classmethod
    def linear(cls, nvars: int, cap: int, c0, coeffs: Mapping[int, Number]) -> "MultiSeries":
        """``c0 + sum coeffs[i] * x_i``."""
        terms = {(0,) * nvars: c0}
        for i, ci in coeffs.items():
            e = [0] * nvars
            e[i] = 1
            terms[tuple(e)] = terms.get(tuple(e), 0) + ci
        return cls(nvars, cap, terms)

    @classmethod
    def binomial(cls, nvars: int, cap: int, var: int, c0: Number, c1: Number,
                 power: int) -> "MultiSeries":
        """Series of ``(c0 + c1*x_var)**power``; negative powers need ``c0 != 0``."""
        c0, c1 = Fraction(c0), Fraction(c1)
        if power < 0 and c0 == 0:
            raise ZeroDivisionError("negative power of a series with zero constant term")
        terms = {}
        for j in range(cap + 1):
            gb = _gen_binom(power, j)
            if gb == 0:
                continue
            e = [0] * nvars
            e[var] = j
            terms[tuple(e)] = gb * c0 ** (power - j) * c1 ** j
        return cls(nvars, cap, terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (self.nvars, self.cap, self.terms) == (other.nvars, other.cap, other.terms)

    def __repr__(self) -> str:
        return f"MultiSeries(nvars={self.nvars}, cap={self.cap}, nterms={len(self.terms)})"

    def _check(self, other: "MultiSeries") -> None:
        if (self.nvars, self.cap) != (other.nvars, other.cap):
            raise ValueError("series have different variable count or truncation cap")

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return MultiSeries(self.nvars, self.cap, terms)

    def __mul__(self, other: "MultiSeries") -> "MultiSeries":
        return series_mul(self, other)

    def coefficient(self, e: Exponent) -> Poly:
        return self.terms.get(tuple(e), Poly())


def _gen_binom(n: int, j: int) -> Fraction:
    """Generalized binomial coefficient C(n, j) for any integer n."""
    num = Fraction(1)
    for i in range(j):
        num *= n - i
    return num / factorial(j)


def series_mul(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    """Truncated product; terms with any exponent above the cap are dropped."""
    a._check(b)
    cap = a.cap
    out: Dict[Exponent, Poly] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if max(e, default=0) > cap:
                continue
            prod = ca * cb
            out[e] = out[e] + prod if e in out else prod
    return MultiSeries(a.nvars, cap, out)


def coefficient_of_product(a: MultiSeries, b: MultiSeries, target: Exponent) -> Poly:
    """Coefficient of ``target`` in ``a*b`` without forming the full product."""
    a._check(b)
    target = tuple(target)
    acc = Poly()
    for ea, ca in a.terms.items():
        eb = tuple(t - x for t, x in zip(target, ea))
        if min(eb, default=0) < 0:
            continue
        cb = b.terms.get(eb)
        if cb is not None:
            acc = acc + ca * cb
    return acc
