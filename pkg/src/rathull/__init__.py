"""Candidate rational hulls of fibered totally real surfaces in C^2."""

__version__ = "0.1.0"
