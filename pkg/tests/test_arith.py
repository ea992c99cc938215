import math
from fractions import Fraction
from math import comb, isqrt

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirpoly.arith import euler, sieve, stats, zeta


def divisor_pass_table(k, X):
    """d_k by k-1 Dirichlet convolutions with the constant function 1."""
    d = np.ones(X + 1, dtype=np.int64)
    d[0] = 0
    for _ in range(k - 1):
        nxt = np.zeros_like(d)
        for a in range(1, X + 1):
            nxt[a::a] += d[a]
        d = nxt
    return d


def hyperbola_sum(X):
    r = isqrt(X)
    return 2 * sum(X // d for d in range(1, r + 1)) - r * r


TAB2 = sieve.sieve_dk(2, 10 ** 5)


class TestSieve:
    def test_small_values(self):
        assert TAB2[12] == 6 and TAB2[1] == 1
        assert sieve.sieve_dk(3, 10)[4] == 6

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_matches_divisor_passes(self, k):
        X = 3000
        assert np.array_equal(sieve.sieve_dk(k, X).values, divisor_pass_table(k, X)[1:])

    def test_hyperbola(self):
        X = 10 ** 4
        assert int(TAB2.values[:X].sum()) == sum(X // d for d in range(1, X + 1))

    def test_prime_power_law_full_scan(self):
        X = 10 ** 5
        for k in (2, 3, 5):
            t = TAB2 if k == 2 else sieve.sieve_dk(k, X)
            for p in sieve.primes_upto(X).tolist():
                e, pe = 1, p
                while pe <= X:
                    assert t[pe] == comb(e + k - 1, k - 1)
                    e, pe = e + 1, pe * p

    @given(st.integers(1, 300), st.integers(1, 300))
    def test_multiplicative(self, m, n):
        if math.gcd(m, n) == 1:
            assert TAB2[m * n] == TAB2[m] * TAB2[n]

    @given(st.integers(1, 90_000), st.integers(1, 5000), st.integers(1, 4))
    def test_segments_match_table(self, lo, length, k):
        hi = min(lo + length, 10 ** 5 + 1)
        seg = sieve.dk_segment(k, lo, hi)
        full = TAB2 if k == 2 else sieve.sieve_dk(k, hi)
        assert np.array_equal(seg, full.window(lo, hi - 1))

    def test_budget(self):
        with pytest.raises(MemoryError):
            sieve.sieve_dk(2, sieve.MEMORY_BUDGET + 1)

    def test_checksum_deterministic(self):
        assert sieve.sieve_dk(2, 5000).checksum() == sieve.sieve_dk(2, 5000).checksum()
        assert sieve.sieve_dk(2, 5000).checksum() != sieve.sieve_dk(3, 5000).checksum()


class TestZeta:
    def test_stieltjes_against_mpmath(self):
        lau = zeta.ZetaLaurent.default()
        with mpmath.workdps(40):
            assert abs(lau.stieltjes[0] - mpmath.euler) < mpmath.mpf(10) ** -31
            for n, g in enumerate(lau.stieltjes):
                assert abs(g - mpmath.stieltjes(n)) <= abs(g) * mpmath.mpf(10) ** -30

    def test_digits(self):
        for s in zeta.STIELTJES:
            assert len(s.lstrip("-").replace("0.", "", 1).lstrip("0")) >= 30

    def test_residue_k1_k2(self):
        assert zeta.residue_main_term(1) == [1.0]
        c = zeta.residue_main_term(2)
        assert c[1] == 1.0
        assert c[0] == pytest.approx(2 * float(mpmath.euler) - 1, abs=1e-15)

    def test_residue_k3_leading(self):
        assert zeta.residue_main_term(3)[2] == pytest.approx(0.5)

    def test_q_restricted_k1(self):
        assert zeta.residue_main_term(1, q=7) == [pytest.approx(6 / 7)]

    def test_order_exceeded(self):
        with pytest.raises(ValueError):
            zeta.residue_main_term(12)

    @pytest.mark.parametrize("X", [10 ** 5, 10 ** 6, 10 ** 7])
    def test_k2_main_term_error(self, X):
        main = float(zeta.main_term(float(X), zeta.residue_main_term(2)))
        assert abs(hyperbola_sum(X) - main) <= X ** 0.8

    def test_k3_main_term(self):
        X = 10 ** 5
        total = int(sieve.sieve_dk(3, X).values.sum())
        main = float(zeta.main_term(float(X), zeta.residue_main_term(3)))
        assert abs(total - main) / X < 0.05

    def test_ap_main_term(self):
        X, q = 10 ** 5, 7
        n = np.arange(1, X + 1)
        total = int(TAB2.values[n % q != 0].sum())
        main = float(zeta.main_term(float(X), zeta.residue_main_term(2, q=q)))
        assert abs(total - main) <= X ** 0.8


class TestEuler:
    def test_k1(self):
        assert euler.compute_ak(1, 1000).value == 1

    def test_a2(self):
        v = euler.compute_ak(2, 10 ** 5).value
        with mpmath.workdps(30):
            assert abs(v - 6 / mpmath.pi ** 2) < 1e-12

    def test_k3_stable_under_doubling(self):
        a = euler.compute_ak(3, 10 ** 5).value
        b = euler.compute_ak(3, 2 * 10 ** 5).value
        assert abs(a - b) < 1e-10

    def test_tail_bound_recorded(self):
        r = euler.compute_ak(4, 10 ** 4)
        assert 0 <= r.tail_bound < 1e-20

    def test_pmax_min(self):
        with pytest.raises(ValueError):
            euler.compute_ak(2, 999)

    def test_log_coeffs_k2(self):
        # log(1 - x^2) = -x^2 - x^4/2 - ...
        c = euler.log_factor_coeffs(2, 6)
        assert c[1:] == [0, -1, 0, Fraction(-1, 2), 0, Fraction(-1, 3)]

    def test_q_k1(self):
        assert float(euler.compute_ak_q(1, 5, 1000).value) == pytest.approx(0.8)

    def test_q_k2_closed_form(self):
        for q in (3, 5, 101):
            got = euler.compute_ak_q(2, q, 10 ** 5).value
            assert abs(got - euler.ak_q_closed_k2(q)) < 1e-12

    def test_q_convergence(self):
        base = float(euler.compute_ak(3, 10 ** 5).value)
        errs = [abs(float(euler.compute_ak_q(3, q, 10 ** 5).value) - base) * q
                for q in (101, 1009, 10007)]
        assert max(errs) / min(errs) < 2
        assert max(errs) < 10 * base

    def test_q_prime_required(self):
        with pytest.raises(ValueError):
            euler.compute_ak_q(2, 9, 1000)

    def test_local_factor_identity(self):
        with mpmath.workdps(30):
            for k in (2, 3, 4):
                for p in (2, 7):
                    x = mpmath.mpf(1) / p
                    assert abs(euler.local_series(k, p) - euler.local_factor(k, x)) < 1e-25


class TestShortInterval:
    @pytest.mark.parametrize("H", [2.3, 5.75, 13.0, 40.125])
    def test_lattice_law(self, H):
        th = H - math.floor(H)
        assert abs(stats.lattice_surrogate(10 ** 6, H) - th * (1 - th)) <= 1e-3

    def test_k2_row(self):
        row = stats.short_interval_variance(2, 10 ** 5, 1.5)
        assert row.variance >= 0
        assert row.H == pytest.approx((10 ** 5) ** (1 / 3), rel=1e-12)
        assert abs(row.mean_delta) <= math.sqrt(row.variance)
        # far from the limit at this size, but the ratio drifts down as X grows
        assert stats.short_interval_variance(2, 10 ** 6, 1.5).ratio < row.ratio

    def test_table_and_fresh_agree(self):
        X = 20_000
        tab = sieve.sieve_dk(2, 2 * X + 100)
        a = stats.short_interval_variance(2, X, 1.5, table=tab)
        b = stats.short_interval_variance(2, X, 1.5)
        assert a.variance == b.variance and a.mean_delta == b.mean_delta
        assert a.checksum == tab.checksum()

    def test_deterministic(self):
        a = stats.short_interval_variance(3, 30_000, 2.0)
        b = stats.short_interval_variance(3, 30_000, 2.0)
        assert a == b

    def test_table_too_small(self):
        with pytest.raises(ValueError):
            stats.short_interval_variance(2, 10 ** 4, 1.5, table=sieve.sieve_dk(2, 10 ** 4))

    def test_H_too_small(self):
        with pytest.raises(ValueError):
            stats.short_interval_variance(2, 100, 1.1)


class TestAP:
    def test_partition_identity(self):
        sums, coprime = stats.ap_class_sums(3, 50_000, 13)
        assert int(sums[1:].sum()) == coprime
        assert int(sums.sum()) == int(sieve.sieve_dk(3, 50_000).values.sum())

    def test_k1_flat(self):
        row = stats.ap_variance(1, 10 ** 4, 101)
        assert row.variance < 1
        assert row.prediction == 0 and row.ratio is None

    def test_k2_band(self):
        q = 101
        row = stats.ap_variance(2, round(q ** 1.5), q)
        assert 0.3 <= row.ratio <= 3

    def test_errors(self):
        with pytest.raises(ValueError):
            stats.ap_variance(2, 100, 101)
        with pytest.raises(ValueError):
            stats.ap_variance(2, 1000, 91)


class TestDirichlet:
    def test_em_route_matches_direct(self):
        t = np.linspace(0, 200, 301)
        K = 40_000
        n = np.arange(1, K + 1, dtype=float)
        direct = stats._direct_sums(t, n ** -0.5, np.log(n))
        em = stats._em_partial_zeta(t, K, 120)
        assert np.max(np.abs(direct - em)) < 1e-9

    def test_residue_k1(self):
        t = np.array([3.0])
        N = 100.5
        s = 0.5 + 3j
        want = N ** (1 - s) / (1 - s)
        assert np.isclose(zeta.dirichlet_residue(t, N, 1)[0], want)

    def test_k1_half(self):
        r = stats.dirichlet_mean_square(1, 2000.0, 0.5)
        assert r.method == "direct" and r.step <= math.pi / (8 * math.log(r.N))
        assert r.N == math.floor(2000 ** 0.5) + 0.5

    def test_budget(self):
        with pytest.raises(ValueError):
            stats.dirichlet_mean_square(2, 1e4, 2.0)
        with pytest.raises(ValueError):
            stats.dirichlet_mean_square(1, 2e5, 0.5)
