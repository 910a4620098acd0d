"""Algorithms for free groups, one-relator groups and graphs of free groups."""

__version__ = "0.1.0"
