from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirpoly import ffield
from dirpoly.ffield import (FFPoly, build_irreducibles, factor, ff_dk, ff_variance,
                            ff_variance_enumerate, ff_variance_sweep, interval_sums,
                            monic_from_index, necklace_count, rows_to_csv)

TABLES = {q: build_irreducibles(q, 6) for q in (2, 3)}


def test_necklace_counts():
    assert [necklace_count(2, d) for d in range(1, 7)] == [2, 1, 2, 3, 6, 9]
    assert necklace_count(3, 2) == 3
    for q, t in TABLES.items():
        assert t.counts() == {d: necklace_count(q, d) for d in range(1, 7)}


def test_rejects_composite_q():
    with pytest.raises(ValueError):
        build_irreducibles(4, 2)
    with pytest.raises(ValueError):
        ff_variance(6, 2, 4, 1)


def test_factor_rebuilds():
    t = TABLES[3]
    f = monic_from_index(517, 6, 3)
    prod = FFPoly(3, (1,))
    for g, e in factor(f, t):
        for _ in range(e):
            prod = prod * FFPoly(3, g)
    assert prod.coeffs == f


def test_dk_prime_power():
    t = TABLES[2]
    x_plus_1 = FFPoly(2, (1, 1))
    f = x_plus_1 * x_plus_1 * x_plus_1
    assert ff_dk(f, 2, t) == 4
    assert ff_dk(f, 3, t) == comb(5, 2)


@given(st.integers(0, 3 ** 3 - 1), st.integers(0, 3 ** 3 - 1), st.integers(1, 4))
def test_dk_multiplicative_on_coprime(i, j, k):
    t = TABLES[3]
    f, g = FFPoly(3, monic_from_index(i, 3, 3)), FFPoly(3, monic_from_index(j, 3, 3))
    shared = {p for p, _ in factor(f.coeffs, t)} & {p for p, _ in factor(g.coeffs, t)}
    if not shared:
        assert ff_dk(f * g, k, t) == ff_dk(f, k, t) * ff_dk(g, k, t)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(2, 5), st.data())
def test_total_sum_identity(q, k, n, data):
    h = data.draw(st.integers(0, n - 1))
    sums = interval_sums(q, k, n, h)
    assert int(sums.sum()) == q ** n * comb(n + k - 1, k - 1)
    assert len(sums) == q ** (n - h - 1)


@pytest.mark.parametrize("case", [(2, 2, 5, 1), (3, 2, 4, 1), (2, 3, 6, 1),
                                  (3, 2, 5, 0), (5, 2, 4, 2), (2, 2, 6, 3)])
def test_routes_agree(case):
    assert ff_variance(*case).lhs == ff_variance_enumerate(*case).lhs


def test_k1_exact_zero():
    for q in (3, 5, 7):
        for h in (1, 2):
            assert ff_variance(q, 1, 6, h).lhs == 0


def test_full_interval_zero_variance():
    # h = n-1: one interval containing everything
    assert ff_variance(3, 2, 4, 3).lhs == 0


def test_result_fields():
    r = ff_variance(5, 2, 8, 2)
    assert r.main_term == 5 ** 3 * 9
    assert r.rmt_value == 1
    assert r.normalized == Fraction(4, 5)
    assert r.to_json()["lhs"] == "100"


def test_sweep_and_csv():
    rows = ff_variance_sweep(2, 6, 1, [3, 5])
    text = rows_to_csv(rows)
    assert text.startswith("q,k,n,h,lhs,normalized,rmt,scaled_diff\r\n")
    assert text.count("\r\n") == 3


def test_enum_budget():
    with pytest.raises(ValueError):
        ff_variance_enumerate(11, 2, 8, 1)
    assert ffield.ENUM_BUDGET == 10 ** 7
