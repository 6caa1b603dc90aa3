"""Integrality and arithmeticity testing for solvable rational matrix groups."""

__version__ = "0.1.0"
