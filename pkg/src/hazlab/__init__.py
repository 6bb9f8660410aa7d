"""Hazard-identification workbench for automated-vehicle concept analysis."""

__version__ = "0.1.0"
