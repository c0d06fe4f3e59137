"""Middle intersection forms and their isometry groups."""

from typing import List

from fastapi import APIRouter, HTTPException, status

from src.records import VerdictRecord
from backend.app.models.forms import FormRequest, IsometryTable
from backend.app.services.obstruction_service import obstruction_service
from backend.app.utils.validators import validate_entry_bound, validate_matrix_size

router = APIRouter()


@router.post("/analyze", response_model=VerdictRecord)
async def analyze_form(request: FormRequest):
    """Run the middle-form obstruction on a unimodular form."""
    for is_valid, error_msg in (
        validate_matrix_size(request.matrix, "form"),
        validate_entry_bound(request.entry_bound),
    ):
        if not is_valid:
            raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=error_msg)
    return await obstruction_service.form_check_async(
        request.matrix, request.chi_nonzero, request.entry_bound
    )


@router.get("/tables", response_model=List[IsometryTable])
async def tables():
    """SO(Q; Z) for the four rank-2 unimodular forms."""
    return await obstruction_service.tables_async()
