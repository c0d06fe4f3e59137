"""FastAPI application entry point."""

import asyncio
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException

from src.errors import DomainError, ObstructionError
from src.logger import setup_logger
from backend.app.config import settings
from backend.app.api.v1.routes import api_router
from backend.app.services.obstruction_service import ServiceBusyError, obstruction_service
from backend.app.middleware.error_handler import (
    busy_handler,
    domain_error_handler,
    general_exception_handler,
    http_exception_handler,
    obstruction_error_handler,
    timeout_handler,
    validation_exception_handler,
)

logger = setup_logger(__name__, settings.LOG_LEVEL)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("Starting Anosov obstructions API...")
    logger.info(f"Example specs: {settings.SPECS_PATH}")
    logger.info("API is ready to accept requests")
    yield
    logger.info("Shutting down Anosov obstructions API...")
    obstruction_service.shutdown()


# Create FastAPI application
app = FastAPI(
    title="Anosov Obstructions API",
    description="Exact cohomological obstructions to Anosov diffeomorphisms",
    version="1.0.0",
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan,
)

# Configure CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins_list,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Register exception handlers
app.add_exception_handler(StarletteHTTPException, http_exception_handler)
app.add_exception_handler(RequestValidationError, validation_exception_handler)
app.add_exception_handler(DomainError, domain_error_handler)
app.add_exception_handler(ObstructionError, obstruction_error_handler)
app.add_exception_handler(asyncio.TimeoutError, timeout_handler)
app.add_exception_handler(ServiceBusyError, busy_handler)
app.add_exception_handler(Exception, general_exception_handler)

# Include API routes
app.include_router(api_router, prefix="/api/v1")


@app.get("/")
async def root():
    """Root endpoint."""
    return {
        "message": "Anosov Obstructions API",
        "version": "1.0.0",
        "docs": "/docs",
        "health": "/api/v1/health"
    }


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {
        "status": "healthy",
        "service": "anosov-obstructions-api"
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "backend.app.main:app",
        host=settings.API_HOST,
        port=settings.API_PORT,
        reload=settings.API_RELOAD
    )
