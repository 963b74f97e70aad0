"""Angle-uniform parallel coordinates engine."""

__version__ = "0.1.0"
