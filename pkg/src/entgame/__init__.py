"""Reproducibility of classical two-strategy games from shared entangled states."""
__version__ = "0.1.0"
