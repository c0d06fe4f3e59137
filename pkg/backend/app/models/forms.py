"""Pydantic models for intersection-form endpoints."""

from typing import List, Optional
from pydantic import BaseModel, Field


class FormRequest(BaseModel):
    """A unimodular symmetric middle form."""
    matrix: List[List[int]] = Field(..., description="Gram matrix of the form", min_length=1)
    chi_nonzero: bool = Field(False, description="The manifold has nonzero Euler characteristic")
    entry_bound: Optional[int] = Field(None, ge=1, description="Entry bound for indefinite searches")


class IsometryTable(BaseModel):
    """SO(Q; Z) shared by one or more forms."""
    forms: List[str] = Field(..., description="Names of forms with this group")
    isometries: List[List[List[int]]] = Field(..., description="Group elements in display order")
