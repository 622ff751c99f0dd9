"""Numerical laboratory for Kazhdan sets in Z, Z^d, R^d, Heisenberg groups and Aff+(R)."""

__version__ = "0.1.0"
