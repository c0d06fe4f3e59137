"""Test suite for Anosov Obstructions."""
