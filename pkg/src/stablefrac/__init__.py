"""Exact local L^p integrability of Q/P for stable two-variable polynomials P."""

__version__ = "0.1.0"
