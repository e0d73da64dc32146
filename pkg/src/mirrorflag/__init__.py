"""Exact computer algebra for the D-module mirror of low-rank type A flag varieties."""

__version__ = "0.1.0"
