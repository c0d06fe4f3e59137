"""Toral automorphism cross-check."""

from fastapi import APIRouter, HTTPException, status

from backend.app.models.oracle import CrossCheckRequest, CrossCheckResponse
from backend.app.services.obstruction_service import obstruction_service
from backend.app.utils.validators import validate_length, validate_matrix_size

router = APIRouter()


@router.post("/cross-check", response_model=CrossCheckResponse)
async def cross_check(request: CrossCheckRequest):
    """Compare Lefschetz numbers with |det(A^l - I)| and the Smith form count."""
    for is_valid, error_msg in (validate_matrix_size(request.matrix, "A"), validate_length(request.length)):
        if not is_valid:
            raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=error_msg)
    return CrossCheckResponse(**await obstruction_service.cross_check_async(request.matrix, request.length))
