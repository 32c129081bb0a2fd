"""Numerical toolkit for rotation numbers of area-preserving annulus maps."""

__version__ = "0.1.0"
