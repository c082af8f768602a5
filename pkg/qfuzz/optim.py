"""
QFuzz Sentiment - Training
==========================

Losses, ADAM, circuit gradients (parameter shift or finite difference)
and the epoch / mini-batch loop shared by every model.

The loop only relies on the model protocol:

    model.trainable                    -> bool
    model.init_params(rng)             -> np.ndarray
    model.score_and_grad(params, x)    -> (score, d score / d params)
    model.score(params, x)             -> score
    model.project(params)              -> params kept inside their domain
    model.fit(features, labels)        -> params   (non-trainable models)
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .circuit import Circuit
from .errors import EmptyInputError, LengthMismatchError, NonBinaryLabelError, NonRotationParameterError

if TYPE_CHECKING:
    from .models import SentimentModel
    from .simulators import CircuitSimulator
    from .textprep import FeatureRecord

logger = logging.getLogger(__name__)

SHIFT = math.pi / 2
FD_STEP = 1e-4
CE_CLIP = 1e-12

GradientMode = Literal["parameter_shift", "finite_difference"]
LossKind = Literal["mse", "cross_entropy"]


# ==========================================
# Configuration & State
# ==========================================

class TrainConfig(BaseModel):
    """Training hyperparameters."""
    epochs: int = Field(default=20, ge=1, description="Passes over the training set (20, 30 or 100)")
    batch_size: int = Field(default=32, ge=1)
    lr: float = Field(default=0.01, ge=0.0, description="ADAM step size (0.1, 0.01 or 0.001)")
    seed: int = Field(default=42, ge=0, lt=2 ** 64)
    gradient_mode: GradientMode = "parameter_shift"
    loss: LossKind = "mse"
    workers: int = Field(default=1, ge=1, description="Threads for per-sample gradients")


@dataclass(frozen=True)
class AdamState:
    """First/second moment estimates plus ADAM constants."""
    m: np.ndarray
    v: np.ndarray
    step: int = 0
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, n_params: int, lr: float = 0.01, **kwargs) -> "AdamState":
        return cls(np.zeros(n_params), np.zeros(n_params), 0, lr, **kwargs)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    train_acc: float
    test_acc: float


@dataclass(frozen=True)
class TrainResult:
    params: np.ndarray
    history: List[EpochRecord]


# ==========================================
# Losses
# ==========================================

def _check_pair(predictions: Sequence[float], targets: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.size == 0 or predictions.shape != targets.shape:
        raise LengthMismatchError(
            f"predictions ({predictions.size}) and targets ({targets.size}) "
            "must have the same non-zero length"
        )
    return predictions, targets


def mse_loss(predictions: Sequence[float], targets: Sequence[float]) -> float:
    """Mean squared error."""
    predictions, targets = _check_pair(predictions, targets)
    return float(np.mean((predictions - targets) ** 2))


def cross_entropy_loss(predictions: Sequence[float], targets: Sequence[float]) -> float:
    """Binary cross-entropy on scores clipped to [1e-12, 1 - 1e-12]."""
    predictions, targets = _check_pair(predictions, targets)
    p = np.clip(predictions, CE_CLIP, 1 - CE_CLIP)
    return float(np.mean(-(targets * np.log(p) + (1 - targets) * np.log(1 - p))))


def loss_value(predictions: Sequence[float], targets: Sequence[float], kind: LossKind = "mse") -> float:
    if kind == "cross_entropy":
        return cross_entropy_loss(predictions, targets)
    return mse_loss(predictions, targets)


def loss_derivative(score: float, target: float, kind: LossKind = "mse") -> float:
    """d loss / d score for one sample."""
    if kind == "cross_entropy":
        p = min(max(score, CE_CLIP), 1 - CE_CLIP)
        return (p - target) / (p * (1 - p))
    return 2.0 * (score - target)


# ==========================================
# Gradients
# ==========================================

def parameter_shift_grad(circuit_eval: Callable, params: Sequence[float], index: int) -> float:
    """
    d f / d params[index] by the shift rule.

    circuit_eval is either a plain function of the parameter vector, in
    which case the parameter is treated as a single rotation, or an object
    exposing occurrences(index) and __call__(params, shifts) so each gate
    the parameter drives is shifted separately and the terms summed.
    """
    params = np.asarray(params, dtype=float)
    occurrences = getattr(circuit_eval, "occurrences", None)
    if occurrences is None:
        plus = params.copy()
        minus = params.copy()
        plus[index] += SHIFT
        minus[index] -= SHIFT
        return 0.5 * (float(circuit_eval(plus)) - float(circuit_eval(minus)))

    total = 0.0
    for op_index in occurrences(index):
        total += 0.5 * (
            float(circuit_eval(params, {op_index: SHIFT}))
            - float(circuit_eval(params, {op_index: -SHIFT}))
        )
    return total


def finite_difference_grad(f: Callable[[np.ndarray], float], params: Sequence[float],
                           index: int, h: float = FD_STEP) -> float:
    """Central difference (f(x + h e_k) - f(x - h e_k)) / 2h."""
    params = np.asarray(params, dtype=float)
    plus = params.copy()
    minus = params.copy()
    plus[index] += h
    minus[index] -= h
    return (float(f(plus)) - float(f(minus))) / (2 * h)


def circuit_gradients(circuit: Circuit, simulator: "CircuitSimulator", params: Sequence[float],
                      inputs: Sequence[float], want_inputs: bool = False,
                      mode: GradientMode = "parameter_shift") -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Expectations and their Jacobians for every qubit.

    Returns:
        tuple: (values (n_qubits,), d/dparams (n_params, n_qubits),
                d/dinputs (n_inputs, n_qubits))
    """
    params, inputs = circuit.check_arguments(params, inputs)
    values = simulator.expectations(circuit, params, inputs)
    d_params = np.zeros((circuit.n_params, circuit.n_qubits))
    d_inputs = np.zeros((circuit.n_inputs, circuit.n_qubits))

    if mode == "finite_difference":
        for k in range(circuit.n_params):
            step = np.zeros(circuit.n_params)
            step[k] = FD_STEP
            d_params[k] = (simulator.expectations(circuit, params + step, inputs)
                           - simulator.expectations(circuit, params - step, inputs)) / (2 * FD_STEP)
        if want_inputs:
            for i in range(circuit.n_inputs):
                step = np.zeros(circuit.n_inputs)
                step[i] = FD_STEP
                d_inputs[i] = (simulator.expectations(circuit, params, inputs + step)
                               - simulator.expectations(circuit, params, inputs - step)) / (2 * FD_STEP)
        return values, d_params, d_inputs

    shifted_ops = []
    for op_index, op in enumerate(circuit.operations):
        needs_param = op.param is not None
        needs_input = want_inputs and bool(op.features)
        if not (needs_param or needs_input):
            continue
        if not op.is_rotation:
            raise NonRotationParameterError(
                f"Operation {op_index} ({op.label}) is parametrized but not a rotation",
                {"operation": op_index},
            )
        shifted_ops.append(op_index)

    shifted = simulator.shifted_expectations(circuit, params, inputs, shifted_ops, SHIFT)
    for row, op_index in enumerate(shifted_ops):
        op = circuit.operations[op_index]
        d_angle = 0.5 * (shifted[row, 0] - shifted[row, 1])
        if op.param is not None:
            d_params[op.param] += d_angle
        if want_inputs and op.features:
            for i, weight in op.input_gradient(inputs).items():
                d_inputs[i] += weight * d_angle
    return values, d_params, d_inputs


# ==========================================
# ADAM
# ==========================================

def adam_step(state: AdamState, params: Sequence[float], grads: Sequence[float]) -> Tuple[AdamState, np.ndarray]:
    """One bias-corrected ADAM update; inputs are left untouched."""
    params = np.asarray(params, dtype=float)
    grads = np.asarray(grads, dtype=float)
    if not (params.shape == grads.shape == state.m.shape):
        raise LengthMismatchError(
            f"params {params.shape}, grads {grads.shape} and state {state.m.shape} differ"
        )
    step = state.step + 1
    m = state.beta1 * state.m + (1 - state.beta1) * grads
    v = state.beta2 * state.v + (1 - state.beta2) * grads * grads
    m_hat = m / (1 - state.beta1 ** step)
    v_hat = v / (1 - state.beta2 ** step)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    new_state = AdamState(m, v, step, state.lr, state.beta1, state.beta2, state.eps)
    return new_state, new_params


# ==========================================
# Training loop
# ==========================================

def accuracy(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Share of samples whose thresholded score (>= 0.5 is class 1) matches."""
    if len(labels) == 0:
        return float("nan")
    predictions = (np.asarray(scores) >= 0.5).astype(int)
    return float(np.mean(predictions == np.asarray(labels)))


def _check_dataset(dataset: Sequence["FeatureRecord"]) -> Tuple[np.ndarray, np.ndarray]:
    if len(dataset) == 0:
        raise EmptyInputError("Training set is empty", code="empty-dataset")
    labels = np.array([r.label for r in dataset])
    if not np.all(np.isin(labels, (0, 1))):
        raise NonBinaryLabelError("Labels must be 0 or 1", {"labels": sorted(set(labels.tolist()))})
    features = np.array([np.asarray(r.features, dtype=float) for r in dataset])
    return features, labels.astype(int)


def _score_all(model: "SentimentModel", params: np.ndarray, features: np.ndarray,
               pool: Optional[ThreadPoolExecutor]) -> np.ndarray:
    if pool is None:
        return np.array([model.score(params, x) for x in features])
    return np.array(list(pool.map(lambda x: model.score(params, x), features)))


def train(model: "SentimentModel", dataset: Sequence["FeatureRecord"], cfg: Optional[TrainConfig] = None,
          test_set: Optional[Sequence["FeatureRecord"]] = None,
          on_epoch: Optional[Callable[[EpochRecord], None]] = None) -> TrainResult:
    """
    Fit a model with mini-batch ADAM.

    Each epoch draws a seeded permutation, forms batches in that order and
    sums per-sample gradients in sample order, so results do not depend on
    the worker count. The epoch loss is the sample-weighted mean of the
    batch losses.
    """
    cfg = cfg or TrainConfig()
    features, labels = _check_dataset(dataset)
    test_features, test_labels = (None, None)
    if test_set:
        test_features, test_labels = _check_dataset(test_set)

    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    history: List[EpochRecord] = []
    try:
        if not model.trainable:
            params = model.fit(features, labels)
            scores = _score_all(model, params, features, pool)
            loss = loss_value(scores, labels, cfg.loss)
            train_acc = accuracy(scores, labels)
            test_acc = (accuracy(_score_all(model, params, test_features, pool), test_labels)
                        if test_features is not None else float("nan"))
            for epoch in range(1, cfg.epochs + 1):
                history.append(EpochRecord(epoch, loss, train_acc, test_acc))
            logger.info(f"{model.name}: fitted without gradient training (loss {loss:.4f}, acc {train_acc:.3f})")
            return TrainResult(params, history)

        rng = np.random.default_rng(cfg.seed)
        params = model.init_params(rng)
        state = AdamState.zeros(params.size, cfg.lr)
        n = len(labels)

        for epoch in range(1, cfg.epochs + 1):
            order = rng.permutation(n)
            weighted_loss = 0.0
            for start in range(0, n, cfg.batch_size):
                batch = order[start:start + cfg.batch_size]
                snapshot = params.copy()
                if pool is None:
                    results = [model.score_and_grad(snapshot, features[i]) for i in batch]
                else:
                    results = list(pool.map(lambda i: model.score_and_grad(snapshot, features[i]), batch))

                scores = np.array([s for s, _ in results])
                batch_labels = labels[batch]
                grad = np.zeros_like(params)
                for (score, g), y in zip(results, batch_labels):
                    grad += loss_derivative(score, y, cfg.loss) * g
                grad /= len(batch)

                weighted_loss += loss_value(scores, batch_labels, cfg.loss) * len(batch)
                state, params = adam_step(state, params, grad)
                params = model.project(params)

            train_acc = accuracy(_score_all(model, params, features, pool), labels)
            test_acc = (accuracy(_score_all(model, params, test_features, pool), test_labels)
                        if test_features is not None else float("nan"))
            record = EpochRecord(epoch, weighted_loss / n, train_acc, test_acc)
            history.append(record)
            logger.info(
                f"{model.name} epoch {epoch}/{cfg.epochs}: loss={record.loss:.6f} "
                f"train_acc={train_acc:.4f} test_acc={test_acc:.4f}"
            )
            if on_epoch is not None:
                on_epoch(record)
    finally:
        if pool is not None:
            pool.shutdown()

    return TrainResult(params, history)
