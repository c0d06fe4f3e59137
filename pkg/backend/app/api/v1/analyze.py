"""Full obstruction reports and sphere-product block tables."""

from typing import Any, Dict

from fastapi import APIRouter, Body, HTTPException, status

from src.records import ObstructionReport
from src.schemas import SphereProductManifold, parse_manifold
from backend.app.services.obstruction_service import obstruction_service
from src.logger import setup_logger

logger = setup_logger(__name__)
router = APIRouter()


@router.post("/analyze", response_model=ObstructionReport)
async def analyze(payload: Dict[str, Any] = Body(..., description="Manifold description with a 'kind' field")):
    """Apply every obstruction rule to a manifold description."""
    spec = parse_manifold(payload, "request body")
    report = await obstruction_service.analyze_async(spec)
    logger.info(f"{spec.kind}: {[c.value for c in report.conclusions()]}")
    return report


@router.post("/sphere-products/blocks")
async def sphere_product_blocks(payload: Dict[str, Any] = Body(...)):
    """Block table of f* on a product of spheres."""
    spec = parse_manifold(payload, "request body")
    if not isinstance(spec, SphereProductManifold):
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"expected kind 'sphere_product', got {spec.kind!r}",
        )
    return await obstruction_service.blocks_async(spec)
