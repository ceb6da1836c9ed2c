"""Bifurcation laboratory for the Lotka-Volterra double center."""

__version__ = "0.1.0"
