"""Symbolic and numeric engine for first-return tower systems on
zero-dimensional dynamical systems and their circle-algebra approximants."""

from . import cpalgebra, errors, ktheory, numeric, space, towers

__all__ = ["cpalgebra", "errors", "ktheory", "numeric", "space", "towers"]
__version__ = "0.1.0"
