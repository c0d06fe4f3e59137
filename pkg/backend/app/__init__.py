"""FastAPI backend for Anosov Obstructions."""

__version__ = "1.0.0"
