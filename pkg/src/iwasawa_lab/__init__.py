"""Numerical laboratory for Iwasawa factorization of harmonic maps into SL(n, R)."""

__version__ = "0.1.0"
