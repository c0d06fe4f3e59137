"""Pydantic models for the toral cross-check endpoint."""

from typing import List
from pydantic import BaseModel, Field


class CrossCheckRequest(BaseModel):
    """A hyperbolic matrix in GL(n, Z)."""
    matrix: List[List[int]] = Field(..., description="Toral automorphism", min_length=1)
    length: int = Field(10, ge=1, description="Periods l = 1..length")


class CrossCheckRowModel(BaseModel):
    l: int
    lefschetz: int
    det_count: int
    smith_count: int


class CrossCheckResponse(BaseModel):
    """Three agreeing periodic-point counts and the growth law."""
    matrix: List[List[int]]
    rows: List[CrossCheckRowModel]
    dominant_modulus: float = Field(..., description="Growth rate from the spectral summary")
    expected_modulus: float = Field(..., description="Product of expanding eigenvalue moduli")
    coefficient: float = Field(..., description="Leading growth coefficient")
    entropy: float = Field(..., description="Log of the expanding product")
