"""Distances to events in finite product spaces, closed-form concentration
bounds, and exact and Monte Carlo checks of the resulting inequalities."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
