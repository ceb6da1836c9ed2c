"""Numerical engines and configuration."""
