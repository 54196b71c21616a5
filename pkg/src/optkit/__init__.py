"""Numerical toolkit for the Bloch-matrix picture of operational probabilistic theories."""

__version__ = "0.1.0"
