"""Main API router combining all v1 endpoints."""

from fastapi import APIRouter
from backend.app.api.v1 import analyze, forms, lefschetz, oracle, rings

api_router = APIRouter()

# Include all sub-routers
api_router.include_router(rings.router, prefix="/rings", tags=["rings"])
api_router.include_router(lefschetz.router, prefix="/lefschetz", tags=["lefschetz"])
api_router.include_router(forms.router, prefix="/forms", tags=["forms"])
api_router.include_router(oracle.router, prefix="/oracle", tags=["oracle"])
api_router.include_router(analyze.router, tags=["analyze"])


@api_router.get("/health")
async def health():
    """Health check endpoint."""
    return {"status": "healthy", "version": "1.0.0"}
