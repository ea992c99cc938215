from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from dirpoly import rmt
from dirpoly.momentpoly import compute_gamma
from dirpoly.schur import (SchurVector, exact_Ik, exact_Itilde, exact_Itilde_direct,
                           fN_coeffs, vertical_strips)


class TestSchur:
    def test_vertical_strips_e1(self):
        assert sorted(vertical_strips((2, 1), 1, 5)) == [(2, 1, 1), (2, 2), (3, 1)]

    def test_vertical_strips_row_bound(self):
        assert list(vertical_strips((), 3, 2)) == []
        assert list(vertical_strips((), 2, 2)) == [(1, 1)]

    def test_pieri_e1_squared(self):
        v = SchurVector.one(4).times_e(1).times_e(1)
        assert v.entries == {(2,): 1, (1, 1): 1}

    def test_documented_values(self):
        assert exact_Ik(1, 3, 5) == 1
        assert exact_Ik(2, 1, 3) == 4
        assert exact_Ik(2, 2, 2) == 10
        assert exact_Ik(3, 0, 4) == 1
        assert exact_Ik(2, 40, 8) == 0

    def test_itilde_values(self):
        assert exact_Itilde(1, 4, 6) == 5
        assert exact_Itilde(2, 2, 3) == 15
        assert exact_Itilde(3, 0, 2) == 1

    @pytest.mark.parametrize("N", [1, 2, 5, 8])
    def test_k2_binomial(self, N):
        for n in range(N + 1):
            assert exact_Ik(2, n, N) == comb(n + 3, 3)

    @given(st.integers(1, 3), st.integers(1, 5), st.data())
    def test_reversal_symmetry(self, k, N, data):
        n = data.draw(st.integers(0, k * N))
        assert exact_Ik(k, n, N) == exact_Ik(k, k * N - n, N)

    @given(st.integers(1, 3), st.integers(1, 5), st.integers(0, 12))
    def test_degree_orthogonality(self, k, N, m):
        assert exact_Itilde(k, m, N) == exact_Itilde_direct(k, m, N)

    def test_fn(self):
        assert fN_coeffs(1, 2) == [1, 1, 1]
        assert fN_coeffs(2, 1) == [1, 4, 1]
        row = fN_coeffs(3, 3)
        assert row == row[::-1] and len(row) == 10

    def test_k1_is_one(self):
        assert all(exact_Ik(1, n, 7) == 1 for n in range(8))


class TestSampling:
    def test_secular_examples(self):
        sc = rmt.secular_coeffs(rmt.EigenAngles(np.array([0.0]))).sc
        assert np.allclose(sc, [1, 1])
        sc = rmt.secular_coeffs(rmt.EigenAngles(np.array([0.0, np.pi]))).sc
        assert np.allclose(sc, [1, 0, -1])

    def test_unitarity_and_reversal(self):
        rng = np.random.default_rng(3)
        u = rmt.haar_unitary(6, rng)
        assert np.allclose(u @ u.conj().T, np.eye(6), atol=1e-12)
        for _ in range(10):
            sc = rmt.secular_coeffs(rmt.haar_sample(6, rng))
            assert sc.reversal_defect() < 1e-10

    def test_n1_uniform_circle(self):
        rng = np.random.default_rng(11)
        theta = np.array([rmt.haar_sample(1, rng).theta[0] for _ in range(10_000)])
        assert stats.kstest(theta / (2 * np.pi), "uniform").pvalue > 1e-3

    def test_trace_moments(self):
        rng = np.random.default_rng(5)
        tr = np.trace(rmt.haar_unitary(5, rng, size=100_000), axis1=1, axis2=2)
        se = np.sqrt(1 / 100_000)
        assert abs(tr.mean()) < 4 * se * np.sqrt(2)
        m2 = np.abs(tr) ** 2
        assert abs(m2.mean() - 1) < 4 * m2.std() / np.sqrt(len(m2))

    def test_phase_correction_matters(self):
        # plain QR output is not Haar: the trace acquires a visible bias
        rng = np.random.default_rng(0)
        tr = np.trace(rmt.haar_unitary(4, rng, size=20_000, phase_correct=False), axis1=1, axis2=2)
        assert abs(tr.mean()) > 0.5

    def test_bad_N(self):
        with pytest.raises(ValueError):
            rmt.haar_unitary(0, np.random.default_rng())
        with pytest.raises(ValueError):
            rmt.haar_unitary(rmt.MAX_N + 1, np.random.default_rng())


class TestMonteCarlo:
    def test_k2_n2(self):
        est = rmt.mc_Ik(2, 2, 8, 20_000, seed=1)
        assert abs(est.mean - 10) <= 4 * est.stderr

    def test_k1_n3(self):
        est = rmt.mc_Ik(1, 3, 8, 20_000, seed=2)
        assert abs(est.mean - 1) <= 4 * est.stderr

    def test_out_of_range(self):
        est = rmt.mc_Ik(2, 40, 8, 1000, seed=0)
        assert est.mean == 0 and est.stderr == 0

    def test_min_samples(self):
        with pytest.raises(ValueError):
            rmt.mc_Ik(1, 1, 2, 50, seed=0)

    def test_seed_determinism(self):
        a = rmt.mc_Ik(2, 3, 4, 2000, seed=9)
        b = rmt.mc_Ik(2, 3, 4, 2000, seed=9)
        assert a == b
        assert rmt.mc_Ik(2, 3, 4, 2000, seed=10).mean != a.mean

    def test_workers_deterministic(self):
        a = rmt.mc_Ik(2, 3, 4, 2000, seed=9, workers=2)
        b = rmt.mc_Ik(2, 3, 4, 2000, seed=9, workers=2)
        assert a == b
        # the two-stream layout equals concatenating the streams by hand
        parts = [rmt._stream_values(2, 3, 4, c, 9, w) for w, c in enumerate(rmt._split(2000, 2))]
        assert a.mean == rmt.batch_means(np.concatenate(parts))[0]

    def test_power_coefficient_brute_force(self):
        P = np.polynomial.polynomial
        rng = np.random.default_rng(4)
        eig = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(3, 4)))
        sc = rmt.secular_coeffs_batch(eig)
        for k, n in ((2, 3), (3, 5)):
            got = rmt.power_coefficient(sc, k, n)
            for row, g in zip(eig, got):
                full = np.array([1.0 + 0j])
                for e in np.tile(row, k):
                    full = P.polymul(full, [1.0, e])
                assert np.isclose(g, full[n])


class TestFfik:
    def test_k1_exact_zero(self):
        rows = rmt.check_ffik(1, 9, range(1, 9))
        assert all(r["scaled_diff_exact"] == 0 for r in rows)

    def test_k2_symmetry_of_exact_column(self):
        N = 16
        rows = {r["n"]: r for r in rmt.check_ffik(2, N, range(1, 2 * N))}
        for n in range(1, 2 * N):
            assert rows[n]["exact"] == rows[2 * N - n]["exact"]
            assert rows[n]["scaled_diff_exact"] == rows[2 * N - n]["scaled_diff_exact"]

    def test_k2_scaled_band(self):
        s16 = rmt.check_ffik(2, 16, [16])[0]["scaled_diff"]
        s32 = rmt.check_ffik(2, 32, [32])[0]["scaled_diff"]
        assert 0.25 <= s32 / s16 <= 4

    def test_asymptotic_matches_gamma(self):
        row = rmt.check_ffik(2, 10, [5])[0]
        assert row["asymptotic"] == float(compute_gamma(2)(Fraction(1, 2)) * 1000)
