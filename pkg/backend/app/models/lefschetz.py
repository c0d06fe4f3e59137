"""Pydantic models for Lefschetz endpoints."""

from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field

from src.lefschetz import TraceConvention
from src.schemas import AutomorphismDocument


class LefschetzRequest(AutomorphismDocument):
    """An automorphism plus sequence options."""
    length: Optional[int] = Field(None, ge=1, description="Number of periods l = 1..length")
    convention: TraceConvention = Field(
        TraceConvention.INVERSE_TRACES,
        description="Trace (f*)^(-l) or (f*)^l",
    )
    growth: bool = Field(False, description="Also classify the growth of the sequence")


class LefschetzResponse(BaseModel):
    """Exact Lefschetz numbers and an optional growth record."""
    convention: TraceConvention
    values: List[int] = Field(..., description="Lambda(f^l) for l = 1..length")
    compatibility: Optional[Dict[str, Any]] = Field(None, description="Growth classification")
