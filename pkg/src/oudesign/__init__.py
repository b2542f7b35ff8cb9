"""Optimal sampling designs for prediction of a trend-shifted complex
Ornstein-Uhlenbeck process on [0, 1]."""

__version__ = "0.1.0"

from .model import Design, OuParams, equispaced  # noqa: F401
