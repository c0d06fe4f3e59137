"""Betti numbers and cup products of ring descriptions."""

from fastapi import APIRouter

from src.schemas import RingDocument
from backend.app.models.rings import BettiResponse, CupRequest, CupResponse
from backend.app.services.obstruction_service import obstruction_service

router = APIRouter()


@router.post("/betti", response_model=BettiResponse)
async def betti(request: RingDocument):
    """Betti numbers, Euler characteristic and Poincare polynomial."""
    return BettiResponse(**await obstruction_service.betti_async(request.ring))


@router.post("/cup", response_model=CupResponse)
async def cup_product(request: CupRequest):
    """Cup product of two basis monomials with its Koszul sign."""
    return CupResponse(**await obstruction_service.cup_async(request.ring, request.a, request.b))
