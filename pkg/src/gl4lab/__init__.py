"""Numerical verification toolkit for GL(4) automorphic coefficients and their transforms."""

__version__ = "0.1.0"
