"""
Health check endpoints for the deeptune API.
"""

from datetime import datetime

from fastapi import APIRouter

from src.core.config import settings
from src.models.schemas import HealthResponse

router = APIRouter()


@router.get("/", response_model=HealthResponse)
async def health_check():
    """Health check endpoint."""
    return HealthResponse(
        status="healthy",
        service=f"{settings.APP_NAME} API",
        timestamp=datetime.now().isoformat(),
        version=settings.APP_VERSION,
    )
