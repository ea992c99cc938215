"""Number-field numerics for the k-fold divisor function."""

from .euler import compute_ak, compute_ak_q
from .sieve import SieveTable, sieve_dk
from .stats import (VarianceRow, ap_variance, dirichlet_mean_square,
                    short_interval_variance)
from .zeta import ZetaLaurent, residue_main_term

__all__ = [
    "SieveTable", "sieve_dk", "ZetaLaurent", "residue_main_term", "compute_ak",
    "compute_ak_q", "VarianceRow", "short_interval_variance", "ap_variance",
    "dirichlet_mean_square",
]
