"""
QFuzz Sentiment - Pydantic Schemas Package
"""

from .sentiment_schemas import (
    PredictRequest,
    BatchPredictRequest,
    ExpectationRequest,
    PredictResponse,
    BatchPredictResponse,
    ExpectationResponse,
    ServiceStatus,
    HealthResponse,
    ErrorResponse,
)

__all__ = [
    "PredictRequest",
    "BatchPredictRequest",
    "ExpectationRequest",
    "PredictResponse",
    "BatchPredictResponse",
    "ExpectationResponse",
    "ServiceStatus",
    "HealthResponse",
    "ErrorResponse",
]
