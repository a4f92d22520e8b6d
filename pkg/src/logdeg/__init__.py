"""Combinatorics and exact series for logarithmic degeneration formulas."""

__version__ = "0.1.0"
