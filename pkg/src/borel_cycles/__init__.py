"""Explicit 3-cycles over cyclotomic fields and their Borel regulator values."""

__version__ = "0.1.0"
