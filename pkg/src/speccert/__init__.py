"""Rigorous spectral enclosures for linearizations at localized states."""

__version__ = "0.1.0"
