"""Exact polytopic generalized probabilistic theories."""

__version__ = "0.1.0"
