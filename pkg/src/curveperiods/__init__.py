"""Certified periods of marked algebraic curves and first order ODE classification."""

__version__ = "0.1.0"
