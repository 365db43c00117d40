"""Exact computations with graded quiver algebras, their modules and Koszul duality."""

__version__ = "0.1.0"
