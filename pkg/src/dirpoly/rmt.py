"""Haar-random unitaries, secular coefficients and Monte Carlo matrix integrals."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, List, Optional

import numpy as np

from .momentpoly import compute_gamma
from .schur import exact_Ik, exact_Itilde, fN_coeffs

__all__ = [
    "EigenAngles", "SecCoeffs", "McEstimate", "haar_unitary", "haar_sample",
    "secular_coeffs", "secular_coeffs_batch", "power_coefficient", "mc_Ik",
    "check_ffik", "exact_Ik", "exact_Itilde", "fN_coeffs",
]

MAX_N = 256
CHUNK = 10_000
N_BATCHES = 50


@dataclass(frozen=True)
class EigenAngles:
    theta: np.ndarray

    def __post_init__(self):
        if len(self.theta) < 1:
            raise ValueError("need at least one eigenangle")

    @property
    def N(self) -> int:
        return len(self.theta)


@dataclass(frozen=True)
class SecCoeffs:
    sc: np.ndarray

    def reversal_defect(self) -> float:
        """``max_j |sc[N-j] - sc[N] * conj(sc[j])|``; zero for a unitary matrix."""
        sc = self.sc
        return float(np.max(np.abs(sc[::-1] - sc[-1] * np.conj(sc))))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int
    workers: int = 1

    def to_json(self) -> dict:
        return asdict(self)


def _check_N(N: int) -> None:
    if not 1 <= N <= MAX_N:
        raise ValueError(f"N must lie in [1, {MAX_N}]")


def haar_unitary(N: int, rng: np.random.Generator, size: Optional[int] = None,
                 phase_correct: bool = True) -> np.ndarray:
    """Haar unitaries from the QR decomposition of complex Ginibre matrices.

    The columns of Q are rescaled by the phases of diag(R); without that step
    the result depends on the QR convention and is not Haar distributed.
    ``phase_correct=False`` exists only so tests can show the bias.
    """
    _check_N(N)
    shape = (N, N) if size is None else (size, N, N)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    if phase_correct:
        d = np.diagonal(r, axis1=-2, axis2=-1)
        q = q * (d / np.abs(d))[..., None, :]
    return q


def haar_sample(N: int, rng: np.random.Generator) -> EigenAngles:
    u = haar_unitary(N, rng)
    theta = np.mod(np.angle(np.linalg.eigvals(u)), 2 * np.pi)
    return EigenAngles(theta)


def secular_coeffs_batch(eigs: np.ndarray) -> np.ndarray:
    """Coefficients of ``prod_j (1 + z e_j)`` for each row of eigenvalues ``eigs``."""
    eigs = np.atleast_2d(eigs)
    B, N = eigs.shape
    sc = np.zeros((B, N + 1), dtype=complex)
    sc[:, 0] = 1.0
    for j in range(N):
        sc[:, 1:j + 2] += eigs[:, j:j + 1] * sc[:, 0:j + 1].copy()
    return sc


def secular_coeffs(angles: EigenAngles) -> SecCoeffs:
    return SecCoeffs(secular_coeffs_batch(np.exp(1j * np.asarray(angles.theta)))[0])


def power_coefficient(sc: np.ndarray, k: int, n: int) -> np.ndarray:
    """Coefficient of z^n in ``Lambda(z)^k`` row-wise, from secular coefficients."""
    B = sc.shape[0]
    a = sc[:, :n + 1]
    if a.shape[1] < n + 1:
        a = np.concatenate([a, np.zeros((B, n + 1 - a.shape[1]), dtype=complex)], axis=1)
    acc = np.zeros((B, n + 1), dtype=complex)
    acc[:, 0] = 1.0
    for _ in range(k):
        nxt = np.zeros_like(acc)
        for i in range(n + 1):
            nxt[:, i:] += acc[:, i:i + 1] * a[:, :n + 1 - i]
        acc = nxt
    return acc[:, n]


def _stream_values(k: int, n: int, N: int, count: int, seed: int, stream: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))
    out = np.empty(count)
    done = 0
    while done < count:
        b = min(CHUNK, count - done)
        u = haar_unitary(N, rng, size=b)
        sc = secular_coeffs_batch(np.linalg.eigvals(u))
        out[done:done + b] = np.abs(power_coefficient(sc, k, n)) ** 2
        done += b
    return out


def _split(samples: int, workers: int) -> List[int]:
    base, extra = divmod(samples, workers)
    return [base + (w < extra) for w in range(workers)]


def batch_means(values: np.ndarray, n_batches: int = N_BATCHES):
    """Mean and batch-means standard error of a sample, in fixed order."""
    n_batches = min(n_batches, len(values) // 2)
    usable = len(values) - len(values) % n_batches
    means = values[:usable].reshape(n_batches, -1).mean(axis=1)
    return float(values.mean()), float(means.std(ddof=1) / np.sqrt(n_batches))


def mc_Ik(k: int, n: int, N: int, samples: int, seed: int, workers: int = 1) -> McEstimate:
    """Monte Carlo estimate of the matrix integral ``I_k(n, N)``.

    Stream ``w`` draws from ``SeedSequence(seed, spawn_key=(w,))``; the streams
    are concatenated in order, so the estimate depends only on
    ``(seed, workers)``, not on scheduling.
    """
    _check_N(N)
    if samples < 100:
        raise ValueError("need at least 100 samples")
    counts = _split(samples, workers)
    if n > k * N or n < 0:
        return McEstimate(0.0, 0.0, samples, seed, workers)
    if workers == 1:
        parts = [_stream_values(k, n, N, counts[0], seed, 0)]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as ex:
            futs = [ex.submit(_stream_values, k, n, N, c, seed, w) for w, c in enumerate(counts)]
            parts = [f.result() for f in futs]
    mean, se = batch_means(np.concatenate(parts))
    return McEstimate(mean, se, samples, seed, workers)


def check_ffik(k: int, N: int, n_grid: Iterable[int]) -> List[dict]:
    """Compare ``I_k(n, N)`` with ``gamma_k(n/N) N^{k^2-1}``.

    The asymptotic value is exact rational arithmetic rounded once; the
    remainder is scaled by ``N^{k^2-2}``.
    """
    gamma = compute_gamma(k)
    rows = []
    for n in n_grid:
        exact = exact_Ik(k, n, N)
        asym = gamma(Fraction(n, N)) * Fraction(N) ** (k * k - 1)
        scaled = (exact - asym) / Fraction(N) ** (k * k - 2)
        rows.append({"k": k, "n": n, "N": N, "exact": exact,
                     "asymptotic": float(asym), "scaled_diff": float(scaled),
                     "scaled_diff_exact": scaled})
    return rows
