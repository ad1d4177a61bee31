"""Exact deformation calculus for commutative DG-algebras in non-positive degrees."""

__version__ = "0.1.0"
