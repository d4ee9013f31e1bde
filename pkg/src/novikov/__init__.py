"""Novikov incidence coefficients: exact series algebra and a torus flow lab."""

__version__ = "0.1.0"
