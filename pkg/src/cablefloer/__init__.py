"""Bordered Floer computations for cables of knots."""

__version__ = "0.1.0"
