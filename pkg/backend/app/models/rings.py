"""Pydantic models for ring endpoints."""

from typing import List
from pydantic import BaseModel, Field

from src.schemas import RingDocument


class CupRequest(RingDocument):
    """A ring plus two basis monomials to multiply."""
    a: str = Field(..., description="First factor, e.g. 'x1^1,x2^1' or 'a:2'", min_length=1)
    b: str = Field(..., description="Second factor", min_length=1)


class BettiResponse(BaseModel):
    """Betti numbers of a ring description."""
    betti: List[int] = Field(..., description="b_0, ..., b_top")
    euler_characteristic: int = Field(..., description="Alternating sum of Betti numbers")
    poincare_polynomial: str = Field(..., description="Sum of b_d t^d")


class CupResponse(BaseModel):
    """Cup product of two basis monomials."""
    a: str
    b: str
    sign: int = Field(..., description="+1, -1, or 0 when the product vanishes")
    product: str = Field(..., description="Resulting basis monomial, or '0'")
