"""Exact-arithmetic toolkit for finite-sum combinatorics, combinatorial-line
search, and measurable recurrence over exactly computable systems."""

__version__ = "0.1.0"
