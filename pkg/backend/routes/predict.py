"""
QFuzz Sentiment - Prediction Routes
===================================

Text classification and raw circuit evaluation.
"""

import logging

from fastapi import APIRouter, Depends, HTTPException

from ..schemas.sentiment_schemas import (
    BatchPredictRequest,
    BatchPredictResponse,
    ExpectationRequest,
    ExpectationResponse,
    PredictRequest,
    PredictResponse,
)

logger = logging.getLogger(__name__)

router = APIRouter(tags=["Prediction"])


def get_sentiment_service():
    """Dependency to get the sentiment service instance."""
    from ..main import sentiment_service
    return sentiment_service


def ensure_loaded(service) -> None:
    """Raise 503 unless a trained model is loaded."""
    if service is None:
        raise HTTPException(status_code=503, detail="Sentiment service not initialized")
    if not service.is_loaded():
        raise HTTPException(status_code=503, detail="No trained model is loaded")


@router.post(
    "/predict",
    response_model=PredictResponse,
    summary="Classify Text",
    description="Clean, featurize and score one utterance"
)
async def predict(request: PredictRequest, service=Depends(get_sentiment_service)):
    ensure_loaded(service)
    return PredictResponse(**service.predict(request.text))


@router.post(
    "/predict/batch",
    response_model=BatchPredictResponse,
    summary="Classify Texts",
    description="Score several utterances; one bad text fails the whole batch"
)
async def predict_batch(request: BatchPredictRequest, service=Depends(get_sentiment_service)):
    ensure_loaded(service)
    results = service.predict_batch(request.texts)
    return BatchPredictResponse(predictions=[PredictResponse(**r) for r in results])


@router.post(
    "/circuit/expectation",
    response_model=ExpectationResponse,
    summary="QFNN Expectation",
    description="Z expectation of the QFNN circuit, optionally under a noise channel"
)
async def circuit_expectation(request: ExpectationRequest, service=Depends(get_sentiment_service)):
    """
    Evaluate the QFNN circuit on two input angles.

    Without explicit params the loaded QFNN / QNN parameters are used, so
    this endpoint works without a model only when params are supplied.
    """
    if service is None:
        raise HTTPException(status_code=503, detail="Sentiment service not initialized")
    if request.params is None and not service.is_loaded():
        raise HTTPException(status_code=503, detail="No trained model is loaded")
    result = service.circuit_expectation(
        request.angles,
        params=request.params,
        channel=request.channel.value if request.channel else None,
        p=request.p,
        placement=request.placement.value,
    )
    return ExpectationResponse(**result)
