"""Vaidman-type quantum games, entanglement measures, noise and secret sharing."""

__version__ = "0.1.0"
