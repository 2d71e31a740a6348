"""Generalized Bessel functions and their algebraic and series structure."""

__version__ = "0.1.0"
