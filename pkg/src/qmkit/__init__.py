"""Numerical quantum-mechanics toolkit."""

__version__ = "0.1.0"
