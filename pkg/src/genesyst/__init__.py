"""Symbolic LTS generation from event-B machines."""

__version__ = "0.1.0"
