"""Pydantic models for API contracts."""
