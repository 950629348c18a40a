"""Puntos de red en dilataciones reales de cross-polytopes y símplices."""

__version__ = "0.1.0"
