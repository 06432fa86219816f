"""Geometric and topological analysis of protein peptide chains as discrete space curves."""

__version__ = "0.1.0"
