"""Exact combinatorics of arc graphs, their partitions and gluings, and
the Frobenius algebra correlators they define on Hochschild cochains."""

__version__ = "0.1.0"
