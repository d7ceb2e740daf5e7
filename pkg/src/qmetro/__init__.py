"""Optimal distribution of quantum-metrology experiments under instrumentation constraints."""

__version__ = "0.1.0"
