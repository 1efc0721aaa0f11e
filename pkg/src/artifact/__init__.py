"""Executable combinatorial dimension theory for group actions at desk scale."""

__version__ = "0.1.0"
