"""Exact and sampled coalition influences of Boolean functions."""

__version__ = "0.1.0"
