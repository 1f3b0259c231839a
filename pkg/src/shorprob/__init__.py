"""Exact success probabilities of Shor's algorithm, with a brute-force oracle."""

__version__ = "0.1.0"
