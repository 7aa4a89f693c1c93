"""Stability-constrained regrasp planning for a simplified biped."""

__version__ = "0.1.0"
