"""
QFuzz Sentiment - Health Check Routes
=====================================

Health and status endpoints for the API.
"""

from fastapi import APIRouter, Depends

from qfuzz import __version__ as API_VERSION

from ..schemas.sentiment_schemas import HealthResponse, ServiceStatus

router = APIRouter(tags=["Health"])


def get_sentiment_service():
    """Dependency to get the sentiment service instance."""
    from ..main import sentiment_service
    return sentiment_service


def get_settings():
    """Dependency to get settings."""
    from config.settings import settings
    return settings


@router.get(
    "/health",
    response_model=HealthResponse,
    summary="Health Check",
    description="Check API health, the loaded model and the simulator it runs on"
)
async def health_check(
    service=Depends(get_sentiment_service),
    settings=Depends(get_settings)
):
    """
    Perform a health check on the API.

    The API stays healthy without a model; prediction routes answer 503
    until one is loaded.

    Returns:
        HealthResponse: API status plus model and simulator state
    """
    state = service.health() if service else {"model_loaded": False}
    return HealthResponse(status="healthy", version=API_VERSION, mode=settings.qfuzz_mode, **state)


@router.get(
    "/status",
    response_model=ServiceStatus,
    summary="Model Status",
    description="Loaded model name, parameter count and run directory"
)
async def get_status(service=Depends(get_sentiment_service)):
    """
    Get the prediction service status.

    Returns:
        ServiceStatus: Loaded model details
    """
    if service is None:
        return ServiceStatus(model_loaded=False, format="qfuzz-params/1")
    return ServiceStatus(**service.get_status())
