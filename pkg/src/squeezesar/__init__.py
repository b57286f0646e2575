"""Squeezed-light RF-photonic synthetic-aperture imaging: simulation and Wiener restoration."""

__version__ = "0.1.0"
