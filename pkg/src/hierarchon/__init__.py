"""Exact computational workbench for the qudit Clifford hierarchy."""

__version__ = "0.1.0"
