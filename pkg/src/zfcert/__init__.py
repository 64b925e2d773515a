"""Certified re-derivation of the constants behind an explicit zero-free region for zeta."""

__version__ = "0.1.0"
