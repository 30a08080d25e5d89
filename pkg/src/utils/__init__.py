"""Utility functions and helpers."""

# Empty init file to avoid circular imports
