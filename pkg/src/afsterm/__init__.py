"""Termination checking for algebraic functional systems with
higher-order polynomial interpretations."""

__version__ = "0.1.0"
