"""Contextual equivalence for finitary call-by-value Idealized Algol."""

DEFAULT_N = 2

__version__ = "0.1.0"
