"""Conditional VAE level generation and blending for tile-based games."""

__version__ = "0.1.0"
