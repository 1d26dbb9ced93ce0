"""Exact computations with mapping-cone L∞ algebras, Maurer-Cartan functors and period maps."""

__version__ = "0.1.0"
