"""Exact combinatorial and convex machinery for measurement scenarios."""

__version__ = "0.1.0"
