"""
QFuzz Sentiment - Prediction Service
====================================

Holds one trained run in memory and answers prediction requests for the
API. The service owns no HTTP concerns; it returns plain dicts and raises
QfuzzError subclasses.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .channels import NoisePlacement, make_channel, noisy_expectation
from .checkpoint import PARAMS_FORMAT, Checkpoint
from .errors import InvalidArgumentError, LengthMismatchError, SchemaMismatchError
from .models import QfnnCircuitSpec, QfnnModel
from .textprep import TextPreprocessor, extract_features

logger = logging.getLogger(__name__)


class SentimentService:
    """
    High-level access to a trained sentiment model.

    Example:
        service = SentimentService()
        service.load("runs/latest")
        service.predict("what a wonderful morning")
    """

    def __init__(self, checkpoint: Optional[Checkpoint] = None, keep_negations: bool = True):
        self.checkpoint = checkpoint
        self.preprocessor = TextPreprocessor(keep_negations=keep_negations)
        self._predictions = 0
        logger.info("SentimentService initialized")

    def load(self, run_dir: Union[str, Path]) -> bool:
        """
        Load a run directory.

        Returns:
            bool: True if the checkpoint was loaded
        """
        run_dir = Path(run_dir)
        if not (run_dir / "params.txt").exists():
            logger.warning(f"No checkpoint in {run_dir}")
            return False
        self.checkpoint = Checkpoint.load(run_dir)
        return True

    def is_loaded(self) -> bool:
        return self.checkpoint is not None

    def health(self) -> Dict[str, Any]:
        """Model and simulator state reported by the health endpoint."""
        if self.checkpoint is None:
            return {"model_loaded": False, "model": None, "simulator": None, "text_ready": False}
        model = self.checkpoint.model
        return {
            "model_loaded": True,
            "model": model.name,
            "simulator": model.simulator.name if model.uses_circuit else None,
            "text_ready": self.checkpoint.stats is not None,
        }

    # ==========================================
    # Prediction
    # ==========================================

    def predict(self, text: str) -> Dict[str, Any]:
        """
        Score one utterance.

        Returns:
            dict: label (0 / 1), score in [0, 1] and the cleaned tokens
        """
        checkpoint = self._require_text_model()
        tokens = self.preprocessor.preprocess(text)
        features = extract_features(tokens, checkpoint.stats, checkpoint.model.input_dim)
        score = float(checkpoint.model.score(checkpoint.params, features))
        self._predictions += 1
        logger.debug(f"Scored {len(tokens)} token(s): {score:.4f}")
        return {"label": int(score >= 0.5), "score": score, "tokens": tokens}

    def predict_batch(self, texts: Sequence[str]) -> List[Dict[str, Any]]:
        logger.info(f"Scoring batch of {len(texts)} text(s)")
        return [self.predict(text) for text in texts]

    def circuit_expectation(self, angles: Sequence[float], params: Optional[Sequence[float]] = None,
                            channel: Optional[str] = None, p: float = 0.0,
                            placement: str = "after_each_layer") -> Dict[str, Any]:
        """
        Z expectation on qubit 0 of the QFNN circuit, optionally under noise.

        Uses the loaded QFNN / QNN parameters unless params are given.
        """
        if len(angles) != 2:
            raise LengthMismatchError(f"The QFNN circuit takes 2 angles, got {len(angles)}")
        circuit = QfnnCircuitSpec().circuit()
        if params is None:
            model = self.checkpoint.model if self.checkpoint is not None else None
            if not isinstance(model, QfnnModel):
                raise InvalidArgumentError("No QFNN parameters loaded; pass params explicitly")
            circuit = model.circuit
            params = self.checkpoint.params
        ch = make_channel(channel, p) if channel else None
        value = noisy_expectation(circuit, np.asarray(params, dtype=float), angles, ch, NoisePlacement(placement))
        return {
            "expectation": float(np.clip(value, -1.0, 1.0)),
            "circuit": circuit.name,
            "channel": channel,
            "p": p if channel else 0.0,
        }

    def _require_text_model(self) -> Checkpoint:
        if self.checkpoint is None:
            raise SchemaMismatchError("No model loaded")
        if self.checkpoint.stats is None:
            raise SchemaMismatchError("The loaded run was trained on numeric features and cannot score text")
        return self.checkpoint

    # ==========================================
    # Status
    # ==========================================

    def get_status(self) -> Dict[str, Any]:
        """
        Get service status.

        Returns:
            dict: Current status information
        """
        if self.checkpoint is None:
            return {"model_loaded": False, "model": None, "n_params": None,
                    "format": PARAMS_FORMAT, "run_dir": None, "predictions": self._predictions}
        return {
            "model_loaded": True,
            "model": self.checkpoint.model.name,
            "n_params": int(self.checkpoint.params.size),
            "format": PARAMS_FORMAT,
            "run_dir": str(self.checkpoint.run_dir) if self.checkpoint.run_dir else None,
            "text_ready": self.checkpoint.stats is not None,
            "options": dict(self.checkpoint.options),
            "predictions": self._predictions,
        }
