"""Correlation-complexity diagnostics and IQP generative modelling for bitstring data."""

__version__ = "0.1.0"
