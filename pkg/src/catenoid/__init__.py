"""Existence, stability and area analysis of catenoids spanning two coaxial rings."""

__version__ = "0.1.0"
