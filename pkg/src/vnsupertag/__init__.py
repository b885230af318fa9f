"""Transition-based dependency parsing with supertag features."""

__version__ = "0.1.0"
