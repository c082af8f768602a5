"""
QFuzz Sentiment - Pydantic Schemas
==================================

Request and response models for the prediction API.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from qfuzz.channels import ChannelLabel, PlacementMode


# ==========================================
# Request Models
# ==========================================

class PredictRequest(BaseModel):
    """Request model for single-text prediction."""
    text: str = Field(..., min_length=1, max_length=2000, description="Utterance to classify")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {"text": "What a wonderful morning, the coffee is great!"}
            ]
        }
    }


class BatchPredictRequest(BaseModel):
    """Request model for batch prediction."""
    texts: List[str] = Field(..., min_length=1, max_length=500, description="Utterances to classify")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {"texts": ["I love this city", "The train was late again, awful"]}
            ]
        }
    }


class ExpectationRequest(BaseModel):
    """Request model for a raw QFNN circuit evaluation."""
    angles: List[float] = Field(..., min_length=2, max_length=2, description="Input angles for qubits 0 and 1")
    params: Optional[List[float]] = Field(None, description="Circuit parameters; defaults to the loaded model")
    channel: Optional[ChannelLabel] = Field(None, description="Noise channel (BF, PF, BPF, DP, AD, PD)")
    p: float = Field(default=0.0, ge=0.0, le=1.0, description="Noise probability")
    placement: PlacementMode = Field(default=PlacementMode.AFTER_EACH_LAYER, description="Where noise is applied")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {"angles": [0.5, 1.2]},
                {"angles": [0.5, 1.2], "params": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
                 "channel": "DP", "p": 0.3, "placement": "final_only"}
            ]
        }
    }


# ==========================================
# Response Models
# ==========================================

class PredictResponse(BaseModel):
    """Prediction for one utterance."""
    label: int = Field(..., ge=0, le=1, description="Predicted class (1 = positive)")
    score: float = Field(..., ge=0.0, le=1.0, description="Class-1 score")
    tokens: List[str] = Field(default_factory=list, description="Cleaned, stemmed tokens")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {"label": 1, "score": 0.83, "tokens": ["wonder", "morn", "coffe", "great"]}
            ]
        }
    }


class BatchPredictResponse(BaseModel):
    predictions: List[PredictResponse]


class ExpectationResponse(BaseModel):
    """QFNN circuit readout."""
    expectation: float = Field(..., ge=-1.0, le=1.0, description="<Z> on qubit 0")
    circuit: str = Field(..., description="Circuit name (qfnn / qnn)")
    channel: Optional[str] = None
    p: float = 0.0


class ServiceStatus(BaseModel):
    """Loaded model status."""
    model_loaded: bool = Field(..., description="Whether a trained run is loaded")
    model: Optional[str] = Field(None, description="Model name")
    n_params: Optional[int] = Field(None, description="Number of trained parameters")
    format: str = Field(..., description="Checkpoint format tag")
    run_dir: Optional[str] = Field(None, description="Run directory the model came from")
    text_ready: Optional[bool] = Field(None, description="Whether corpus statistics are available")
    options: Optional[Dict[str, str]] = Field(None, description="Model options")
    predictions: int = Field(0, description="Predictions served since startup")

    model_config = {
        "protected_namespaces": (),
        "json_schema_extra": {
            "examples": [
                {
                    "model_loaded": True,
                    "model": "qfnn",
                    "n_params": 8,
                    "format": "qfuzz-params/1",
                    "run_dir": "runs/latest",
                    "text_ready": True,
                    "predictions": 12
                }
            ]
        }
    }


class HealthResponse(BaseModel):
    """Health check response model."""
    status: str = Field(..., description="API health status")
    version: str = Field(..., description="API version")
    mode: str = Field(..., description="Operating mode (DEV/PROD)")
    model_loaded: bool = Field(..., description="Whether a trained run is loaded")
    model: Optional[str] = Field(None, description="Loaded model name")
    simulator: Optional[str] = Field(None, description="Circuit backend, or null for classical models")
    text_ready: bool = Field(False, description="Whether /predict can score raw text")

    model_config = {
        "protected_namespaces": (),
        "json_schema_extra": {
            "examples": [
                {
                    "status": "healthy",
                    "version": "1.0.0",
                    "mode": "DEV",
                    "model_loaded": True,
                    "model": "qfnn",
                    "simulator": "statevector",
                    "text_ready": True
                }
            ]
        }
    }


class ErrorResponse(BaseModel):
    """Error response model."""
    success: bool = Field(default=False, description="Always false for errors")
    error: str = Field(..., description="Error type/code")
    message: str = Field(..., description="Human-readable error message")
    details: Optional[Dict[str, Any]] = Field(None, description="Additional error details")
