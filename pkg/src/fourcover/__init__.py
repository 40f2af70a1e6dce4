"""Explicit 4-covers of elliptic curves, their twists, and modular surfaces of level 4."""

__version__ = "0.1.0"
