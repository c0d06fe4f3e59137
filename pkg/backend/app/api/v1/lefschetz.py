"""Lefschetz sequences of graded automorphisms."""

from fastapi import APIRouter, HTTPException, status

from backend.app.models.lefschetz import LefschetzRequest, LefschetzResponse
from backend.app.services.obstruction_service import obstruction_service
from backend.app.utils.validators import validate_length

router = APIRouter()


@router.post("/", response_model=LefschetzResponse)
async def lefschetz(request: LefschetzRequest):
    """Compute Lambda(f^l) for l = 1..length.

    Args:
        request: Ring, f* and sequence options

    Returns:
        Sequence values and, with growth=true, the compatibility record
    """
    is_valid, error_msg = validate_length(request.length)
    if not is_valid:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=error_msg)

    result = await obstruction_service.lefschetz_async(
        request, request.length, request.convention, request.growth
    )
    return LefschetzResponse(**result)
