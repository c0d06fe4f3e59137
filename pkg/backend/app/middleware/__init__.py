"""Middleware components."""

