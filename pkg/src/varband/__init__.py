"""Numerics for Paley-Wiener spaces of variable bandwidth."""

__version__ = "0.1.0"
