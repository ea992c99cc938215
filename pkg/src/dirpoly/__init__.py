"""Exact moment polynomials, unitary-matrix integrals and divisor-sum variances."""

__version__ = "0.1.0"
