"""Exact p-variation, Levy area and rough-path norms of partial-sum processes."""

__version__ = "0.1.0"
