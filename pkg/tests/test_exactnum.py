import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirpoly.exactnum import (DiscontinuityError, MultiSeries, PiecewisePoly, Poly,
                              coefficient_of_product, format_rational, parse_rational,
                              pw_convolve, pw_differentiate, pw_integrate, series_mul)

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.lists(small, min_size=0, max_size=5).map(Poly)


@st.composite
def compact_pw(draw):
    """Compact piecewise polynomials on a few integer breakpoints."""
    start = draw(st.integers(-2, 2))
    n = draw(st.integers(1, 3))
    pieces = draw(st.lists(polys, min_size=n, max_size=n))
    return PiecewisePoly(range(start, start + n + 1), pieces, ())


class TestPoly:
    def test_trimming_and_degree(self):
        p = Poly([1, 2, 0, 0])
        assert p.degree == 1
        assert Poly().degree == -1
        assert Poly([0, 0]) == Poly()

    def test_evaluation_exact(self):
        p = Poly([Fraction(1, 3), 0, 2])
        assert p(Fraction(1, 2)) == Fraction(1, 3) + Fraction(1, 2)

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            Poly([0.5])

    def test_compose_linear(self):
        p = Poly([0, 0, 1])  # x^2
        assert p.compose_linear(3, -1) == Poly([9, -6, 1])

    def test_root_multiplicity(self):
        x = Poly.x()
        assert ((x - 2) ** 4 * (x + 1)).root_multiplicity(2) == 4
        assert Poly([1, 1]).root_multiplicity(0) == 0

    @given(polys, polys)
    def test_degree_additive(self, p, q):
        if p and q:
            assert (p * q).degree == p.degree + q.degree

    @given(polys, polys, small)
    def test_ring_homomorphism(self, p, q, x):
        assert (p * q)(x) == p(x) * q(x)
        assert (p + q)(x) == p(x) + q(x)

    @given(polys)
    def test_fundamental_theorem(self, p):
        assert p.antiderivative().derivative() == p

    def test_json_rationals(self):
        assert Poly([Fraction(1, 2), 3]).to_json() == ["1/2", 3]
        assert format_rational(Fraction(-7, 3)) == "-7/3"
        assert parse_rational("-7/3") == Fraction(-7, 3)


class TestPiecewise:
    def test_indicator_and_eval(self):
        f = PiecewisePoly.indicator(0, 1)
        assert f(0) == 1 and f(Fraction(1, 2)) == 1
        assert f(1) == 0 and f(-1) == 0

    def test_canonical_merging(self):
        f = PiecewisePoly([0, 1, 2], [Poly.const(1), Poly.const(1)], ())
        assert f == PiecewisePoly.indicator(0, 2)
        g = PiecewisePoly([0, 1, 2], [Poly(), Poly.x()], ())
        assert g.breakpoints == (1, 2)

    def test_bad_breakpoints(self):
        with pytest.raises(ValueError):
            PiecewisePoly([1, 0], [Poly.const(1)], ())

    def test_spec_json_shape(self):
        f = PiecewisePoly.indicator(0, 1)
        assert f.dumps() == '{"breakpoints":[0,1],"pieces":[[1]],"tail":[]}'
        assert PiecewisePoly.from_json(json.loads(f.dumps())) == f

    def test_hat(self):
        ind = PiecewisePoly.indicator(0, 1)
        hat = pw_convolve(ind, ind)
        assert hat(Fraction(1, 2)) == Fraction(1, 2)
        assert hat(Fraction(3, 2)) == Fraction(1, 2)
        assert hat(1) == 1

    def test_irwin_hall_three(self):
        ind = PiecewisePoly.indicator(0, 1)
        f = pw_convolve(pw_convolve(ind, ind), ind)
        assert f(Fraction(3, 2)) == Fraction(3, 4)
        assert pw_integrate(f, 0, 3) == 1

    def test_discontinuity_detected(self):
        with pytest.raises(DiscontinuityError):
            pw_differentiate(PiecewisePoly.indicator(0, 1))

    def test_convolve_needs_compact(self):
        f = PiecewisePoly([0], [], Poly.const(1))
        with pytest.raises(ValueError):
            pw_convolve(f, PiecewisePoly.indicator(0, 1))

    @given(compact_pw(), compact_pw())
    def test_convolution_commutes(self, f, g):
        assert pw_convolve(f, g) == pw_convolve(g, f)

    @given(compact_pw(), compact_pw(), compact_pw())
    def test_convolution_associative(self, f, g, h):
        assert pw_convolve(pw_convolve(f, g), h) == pw_convolve(f, pw_convolve(g, h))

    @given(compact_pw(), compact_pw())
    def test_convolution_mass(self, f, g):
        def mass(u):
            if not u.breakpoints:
                return 0
            a, b = u.support()
            return pw_integrate(u, a, b)
        assert mass(pw_convolve(f, g)) == mass(f) * mass(g)

    @given(compact_pw(), small)
    def test_integral_additive(self, f, c):
        a, b = Fraction(-3), Fraction(6)
        c = min(max(c, a), b)
        assert pw_integrate(f, a, b) == pw_integrate(f, a, c) + pw_integrate(f, c, b)

    @given(compact_pw())
    def test_json_round_trip(self, f):
        assert PiecewisePoly.from_json(f.dumps()) == f


class TestMultiSeries:
    def test_binomial_inverse(self):
        s = MultiSeries.binomial(1, 4, 0, 1, 1, -2)
        t = MultiSeries.binomial(1, 4, 0, 1, 1, 2)
        assert s * t == MultiSeries.constant(1, 4)

    def test_truncation(self):
        x = MultiSeries.linear(2, 1, 0, {0: 1})
        assert (x * x).terms == {}

    def test_coefficient_of_product_matches_full(self):
        a = MultiSeries.binomial(2, 3, 0, 2, 1, -3) * MultiSeries.linear(2, 3, 1, {1: 5})
        b = MultiSeries.binomial(2, 3, 1, 1, -1, 4)
        full = series_mul(a, b)
        for e in [(0, 0), (1, 2), (3, 3), (2, 0)]:
            assert coefficient_of_product(a, b, e) == full.coefficient(e)

    def test_mismatched_caps(self):
        with pytest.raises(ValueError):
            MultiSeries.constant(1, 2) + MultiSeries.constant(1, 3)
