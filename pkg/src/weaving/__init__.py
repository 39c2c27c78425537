"""Symbolic mutation engine for the four-stage weaving of semi-orthogonal decompositions."""

__version__ = "0.1.0"
