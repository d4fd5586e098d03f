"""Quantum Fisher information for noise-parameter estimation of vector-encoding channels."""

__version__ = "0.1.0"
