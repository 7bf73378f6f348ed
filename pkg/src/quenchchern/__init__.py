"""Nonadiabatic quench characterization of 2D Chern insulators."""
__version__ = "0.1.0"
