"""Computations in mapping-class groups of punctured surfaces with one boundary component."""

__version__ = "0.1.0"
