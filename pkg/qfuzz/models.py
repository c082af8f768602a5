"""
QFuzz Sentiment - Models
========================

Forward passes and gradients for every classifier:

- qfnn: 2-qubit circuit, angle embedding, two RX-RY-CZ layers and the
  extended fuzzy layer of shared-parameter RX/RY blocks
- qnn:  the same circuit without the fuzzy layer
- hqnn: dense pre-angle layer -> ZZ feature map -> 16-parameter ansatz
  -> linear head on the four Z expectations
- hfnn: hqnn behind a trainable Gaussian membership layer
- ann:  2-4-1 dense network (tanh hidden, sigmoid output)
- cf:   classical fuzzy grid rulebase (fitted, not trained)

Every model works on a flat parameter vector; param_blocks() splits it
into named arrays for checkpoints and from_blocks() joins them back.
"""

import copy
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, ClassVar, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .circuit import Circuit, Encoding, Operation, run_statevector
from .errors import (
    ArityMismatchError,
    CheckpointFormatError,
    InvalidAngleError,
    InvalidArgumentError,
    LengthMismatchError,
    MissingFuzzyLayerError,
    UnsupportedModelError,
    ZeroMembershipError,
)
from .fuzzy import FuzzyOperators, build_cf_rulebase, cf_score, grid_rulebase
from .optim import GradientMode, circuit_gradients
from .qsim import StateVector, measurement_probabilities
from .simulators import CircuitSimulator, StatevectorSimulator
from .textprep import angle_scale

logger = logging.getLogger(__name__)

MODEL_NAMES = ("qfnn", "qnn", "hqnn", "hfnn", "ann", "cf")
ANSATZ_KINDS = ("efficient_su2", "real_amplitudes")
ANSATZ_PARAMS = 16
HYBRID_QUBITS = 4


# ==========================================
# Activations
# ==========================================

def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def relu(z):
    return np.maximum(z, 0.0)


ACTIVATIONS = {"tanh": np.tanh, "relu": relu, "sigmoid": sigmoid}


def _activation_grad(name: str, pre: np.ndarray, out: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return 1.0 - out ** 2
    if name == "relu":
        return (pre > 0).astype(float)
    return out * (1.0 - out)


def _finite_vector(values: Sequence[float], length: int, what: str) -> np.ndarray:
    vector = np.asarray(values, dtype=float)
    if vector.shape != (length,):
        raise LengthMismatchError(f"{what} must have length {length}, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise InvalidAngleError(f"{what} must be finite")
    return vector


# ==========================================
# QFNN
# ==========================================

@dataclass(frozen=True)
class QfnnParams:
    """The trainable angles theta_1 ... theta_n, stored unwrapped."""
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 1 or not np.all(np.isfinite(theta)):
            raise InvalidAngleError("QFNN parameters must be a finite vector")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def random(cls, rng: np.random.Generator, n_params: int = 8) -> "QfnnParams":
        return cls(rng.uniform(0.0, math.pi, size=n_params))


@dataclass(frozen=True)
class QfnnCircuitSpec:
    """
    Shape of the QFNN circuit.

    Attributes:
        embedding_axis: Rotation axis used to embed each feature ("x" or "y")
        fuzzy_block_count: Number of shared-parameter RX/RY blocks
        cz_after_each_fuzzy_block: CZ after every block, otherwise once after the layer
        layer2_extra_ry: Also apply RY(theta_2) on qubit 1 in layer 2
    """
    n_qubits: int = 2
    embedding_axis: str = "x"
    fuzzy_block_count: int = 4
    cz_after_each_fuzzy_block: bool = True
    layer2_extra_ry: bool = False

    def __post_init__(self):
        if self.n_qubits != 2:
            raise ArityMismatchError(f"The QFNN uses 2 qubits, got {self.n_qubits}")
        if self.embedding_axis not in ("x", "y"):
            raise InvalidArgumentError(f"Embedding axis must be x or y, got {self.embedding_axis!r}")
        if self.fuzzy_block_count < 0:
            raise InvalidArgumentError("fuzzy_block_count must be >= 0")

    @property
    def param_count(self) -> int:
        return 4 + self.fuzzy_block_count

    def circuit(self) -> Circuit:
        return build_qfnn_circuit(self)


@lru_cache(maxsize=None)
def build_qfnn_circuit(spec: QfnnCircuitSpec) -> Circuit:
    embed = "R" + spec.embedding_axis.upper()
    ops: List[Operation] = [
        Operation(embed, (0,), features=(0,), layer=0),
        Operation(embed, (1,), features=(1,), layer=0),
        Operation("RX", (0,), param=0, layer=1),
        Operation("RY", (1,), param=1, layer=1),
        Operation("CZ", (0, 1), layer=1),
        Operation("RX", (0,), param=2, layer=2),
        Operation("RY", (1,), param=3, layer=2),
    ]
    if spec.layer2_extra_ry:
        ops.append(Operation("RY", (1,), param=1, layer=2))
    ops.append(Operation("CZ", (0, 1), layer=2))

    for k in range(spec.fuzzy_block_count):
        layer = 3 + k
        ops.append(Operation("RX", (0,), param=4 + k, layer=layer))
        ops.append(Operation("RY", (1,), param=4 + k, layer=layer))
        if spec.cz_after_each_fuzzy_block or k == spec.fuzzy_block_count - 1:
            ops.append(Operation("CZ", (0, 1), layer=layer))

    name = "qfnn" if spec.fuzzy_block_count else "qnn"
    return Circuit(2, tuple(ops), spec.param_count, 2, name)


def qfnn_forward(spec: QfnnCircuitSpec, params: Union[QfnnParams, Sequence[float]],
                 angles: Sequence[float], simulator: Optional[CircuitSimulator] = None) -> Tuple[float, float]:
    """
    Evaluate the QFNN on one pair of input angles.

    Returns:
        tuple: (<Z> on qubit 0, sigmoid of it)
    """
    theta = params.theta if isinstance(params, QfnnParams) else np.asarray(params, dtype=float)
    theta = _finite_vector(theta, spec.param_count, "QFNN parameters")
    angles = _finite_vector(angles, 2, "QFNN input angles")
    simulator = simulator or StatevectorSimulator()
    expectation = simulator.expectation(spec.circuit(), theta, angles, 0)
    return expectation, float(sigmoid(expectation))


def _qfm_pair(p0: float, p1: float, memberships: Sequence[float]) -> Tuple[float, float]:
    mu0, mu1 = (float(m) for m in memberships)
    if mu0 < 0 or mu1 < 0:
        raise InvalidArgumentError(f"Memberships must be non-negative, got {(mu0, mu1)}")
    if mu0 + mu1 <= 0:
        raise ZeroMembershipError("Memberships sum to zero")
    raw0 = (mu0 * p0) ** 2
    raw1 = (mu1 * p1) ** 2
    total = raw0 + raw1
    if total <= 0:
        return 0.5, 0.5
    return raw0 / total, raw1 / total


def qfm_probabilities(state: StateVector, memberships: Sequence[float]) -> Tuple[float, float]:
    """
    Class probabilities from membership-weighted projectors on qubit 0.

    raw_i = (mu_i * P(qubit 0 = i))^2, normalized to sum to 1.
    """
    probs = measurement_probabilities(state)
    bit0 = np.arange(probs.size) & 1
    p1 = float(np.sum(probs[bit0 == 1]))
    return _qfm_pair(1.0 - p1, p1, memberships)


# ==========================================
# Hybrid circuits
# ==========================================

@dataclass(frozen=True)
class GaussianFuzzyLayer:
    """One Gaussian membership per input feature."""
    centers: np.ndarray
    widths: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        widths = np.asarray(self.widths, dtype=float)
        if centers.shape != widths.shape:
            raise LengthMismatchError("centers and widths must have the same length")
        if np.any(widths <= 0):
            raise InvalidArgumentError("Fuzzy widths must be positive")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "widths", widths)

    def memberships(self, features: np.ndarray) -> np.ndarray:
        return np.exp(-((features - self.centers) ** 2) / (2 * self.widths ** 2))


@dataclass(frozen=True)
class HybridSpec:
    """Parameters and layout of the HQNN / HFNN."""
    ansatz_params: np.ndarray
    dense_weights: np.ndarray
    dense_bias: np.ndarray
    head_weights: np.ndarray
    head_bias: float = 0.0
    fuzzy_layer: Optional[GaussianFuzzyLayer] = None
    n_qubits: int = HYBRID_QUBITS
    feature_map_reps: int = 3
    entanglement: str = "full"
    ansatz: str = "efficient_su2"

    def __post_init__(self):
        if self.n_qubits != HYBRID_QUBITS:
            raise ArityMismatchError(f"Hybrid models use {HYBRID_QUBITS} qubits")
        _finite_vector(self.ansatz_params, ANSATZ_PARAMS, "ansatz parameters")
        if np.asarray(self.dense_weights).shape != (HYBRID_QUBITS, 2 * HYBRID_QUBITS):
            raise LengthMismatchError("dense_weights must be 4x8")
        if self.ansatz not in ANSATZ_KINDS:
            raise InvalidArgumentError(f"Unknown ansatz {self.ansatz!r}")

    def circuit(self) -> Circuit:
        return build_hybrid_circuit(self.feature_map_reps, self.entanglement, self.ansatz)


def _pairs(n_qubits: int, entanglement: str) -> List[Tuple[int, int]]:
    if entanglement == "full":
        return [(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]
    if entanglement == "linear":
        return [(i, i + 1) for i in range(n_qubits - 1)]
    raise InvalidArgumentError(f"Unknown entanglement {entanglement!r}")


def feature_map_operations(reps: int = 3, entanglement: str = "full",
                           n_qubits: int = HYBRID_QUBITS) -> List[Operation]:
    """Second-order ZZ feature map; one layer per repetition."""
    ops = []
    for rep in range(reps):
        for q in range(n_qubits):
            ops.append(Operation("H", (q,), layer=rep))
        for q in range(n_qubits):
            ops.append(Operation("RZ", (q,), features=(q,), scale=2.0, layer=rep))
        for i, j in _pairs(n_qubits, entanglement):
            ops.append(Operation("CX", (i, j), layer=rep))
            ops.append(Operation("RZ", (j,), features=(i, j), encoding=Encoding.ZZ, scale=2.0, layer=rep))
            ops.append(Operation("CX", (i, j), layer=rep))
    return ops


def ansatz_operations(kind: str = "efficient_su2", first_layer: int = 0,
                      n_qubits: int = HYBRID_QUBITS) -> List[Operation]:
    """
    Trainable block with 16 parameters.

    efficient_su2: (RY, RZ) on every qubit, CX chain, (RY, RZ) again.
    real_amplitudes: four RY layers separated by CX chains.
    """
    chain = [(q, q + 1) for q in range(n_qubits - 1)]
    ops = []
    if kind == "efficient_su2":
        rotation_layers = [("RY", "RZ")] * 2
    elif kind == "real_amplitudes":
        rotation_layers = [("RY",)] * 4
    else:
        raise InvalidArgumentError(f"Unknown ansatz {kind!r}")

    param = 0
    for depth, labels in enumerate(rotation_layers):
        layer = first_layer + depth
        if depth > 0:
            ops.extend(Operation("CX", pair, layer=layer) for pair in chain)
        for label in labels:
            for q in range(n_qubits):
                ops.append(Operation(label, (q,), param=param, layer=layer))
                param += 1
    return ops


@lru_cache(maxsize=None)
def build_hybrid_circuit(reps: int = 3, entanglement: str = "full", ansatz: str = "efficient_su2") -> Circuit:
    ops = feature_map_operations(reps, entanglement) + ansatz_operations(ansatz, first_layer=reps)
    return Circuit(HYBRID_QUBITS, tuple(ops), ANSATZ_PARAMS, HYBRID_QUBITS, f"hybrid-{ansatz}")


def hybrid_feature_map(angles: Sequence[float], reps: int = 3, entanglement: str = "full") -> StateVector:
    """Encode four angles with the ZZ feature map, starting from |0000>."""
    angles = _finite_vector(angles, HYBRID_QUBITS, "feature map angles")
    circuit = Circuit(HYBRID_QUBITS, tuple(feature_map_operations(reps, entanglement)), 0, HYBRID_QUBITS,
                      "zz-feature-map")
    return run_statevector(circuit, np.zeros(0), angles)


def hybrid_ansatz(state: StateVector, params: Sequence[float], kind: str = "efficient_su2") -> StateVector:
    """Apply the 16-parameter ansatz to a 4-qubit state."""
    if state.n_qubits != HYBRID_QUBITS:
        raise ArityMismatchError(f"The ansatz acts on {HYBRID_QUBITS} qubits, got {state.n_qubits}")
    params = np.asarray(params, dtype=float)
    if params.shape != (ANSATZ_PARAMS,):
        raise LengthMismatchError(f"The ansatz takes {ANSATZ_PARAMS} parameters, got {params.size}")
    circuit = Circuit(HYBRID_QUBITS, tuple(ansatz_operations(kind)), ANSATZ_PARAMS, 0, f"ansatz-{kind}")
    return run_statevector(circuit, params, np.zeros(0), initial=state)


def _hybrid_pass(spec: HybridSpec, features: Sequence[float], simulator: CircuitSimulator,
                 use_fuzzy: bool, want_grad: bool = False,
                 mode: GradientMode = "parameter_shift") -> Tuple[float, Optional[Dict[str, Any]]]:
    x = np.asarray(features, dtype=float)
    if x.shape != (HYBRID_QUBITS,) or not np.all(np.isfinite(x)):
        raise InvalidAngleError(f"Hybrid models take 4 finite features, got {features!r}")

    if use_fuzzy:
        u = spec.fuzzy_layer.memberships(x)
    else:
        u = x
    z = np.concatenate([u, 1.0 - u])
    pre = spec.dense_weights @ z + spec.dense_bias
    gate = sigmoid(pre)
    angles = math.pi * gate
    head = np.asarray(spec.head_weights, dtype=float)

    circuit = spec.circuit()
    if not want_grad:
        expectations = simulator.expectations(circuit, spec.ansatz_params, angles)
        return float(sigmoid(head @ expectations + spec.head_bias)), None

    expectations, d_params, d_inputs = circuit_gradients(
        circuit, simulator, spec.ansatz_params, angles, want_inputs=True, mode=mode
    )
    score = float(sigmoid(head @ expectations + spec.head_bias))
    d_out = score * (1.0 - score)
    d_expect = d_out * head
    d_angles = d_inputs @ d_expect
    d_pre = d_angles * math.pi * gate * (1.0 - gate)
    d_z = spec.dense_weights.T @ d_pre
    grads: Dict[str, Any] = {
        "ansatz": d_params @ d_expect,
        "dense_weights": np.outer(d_pre, z),
        "dense_bias": d_pre,
        "head_weights": d_out * expectations,
        "head_bias": np.array([d_out]),
    }
    if use_fuzzy:
        d_u = d_z[:HYBRID_QUBITS] - d_z[HYBRID_QUBITS:]
        layer = spec.fuzzy_layer
        diff = x - layer.centers
        grads["centers"] = d_u * u * diff / layer.widths ** 2
        grads["widths"] = d_u * u * diff ** 2 / layer.widths ** 3
    return score, grads


def hqnn_forward(spec: HybridSpec, features: Sequence[float],
                 simulator: Optional[CircuitSimulator] = None) -> float:
    """Score in (0, 1) for four features in [0, 1]."""
    return _hybrid_pass(spec, features, simulator or StatevectorSimulator(), use_fuzzy=False)[0]


def hfnn_forward(spec: HybridSpec, features: Sequence[float],
                 simulator: Optional[CircuitSimulator] = None) -> float:
    """hqnn_forward behind the Gaussian membership layer."""
    if spec.fuzzy_layer is None:
        raise MissingFuzzyLayerError("hfnn_forward needs a fuzzy layer")
    return _hybrid_pass(spec, features, simulator or StatevectorSimulator(), use_fuzzy=True)[0]


# ==========================================
# ANN
# ==========================================

@dataclass(frozen=True)
class AnnParams:
    """2-4-1 dense network weights."""
    hidden_weights: np.ndarray
    hidden_bias: np.ndarray
    output_weights: np.ndarray
    output_bias: float = 0.0

    def __post_init__(self):
        if np.asarray(self.hidden_weights).shape != (2, 4):
            raise LengthMismatchError("hidden_weights must be 2x4")
        for name in ("hidden_weights", "hidden_bias", "output_weights"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidAngleError(f"{name} must be finite")

    @classmethod
    def zeros(cls) -> "AnnParams":
        return cls(np.zeros((2, 4)), np.zeros(4), np.zeros(4), 0.0)


def ann_forward(params: AnnParams, features: Sequence[float], activation: str = "tanh") -> float:
    """sigmoid(v . act(x W + b_h) + b_o)."""
    x = _finite_vector(features, 2, "ANN features")
    hidden = ACTIVATIONS[activation](x @ params.hidden_weights + params.hidden_bias)
    return float(sigmoid(hidden @ params.output_weights + params.output_bias))


# ==========================================
# Model classes
# ==========================================

class SentimentModel(ABC):
    """
    Common interface used by the training loop, the harness and the API.

    Circuit models hold a CircuitSimulator, so the same trained
    parameters can be evaluated noiselessly or under noise.
    """

    name: ClassVar[str] = "model"
    input_dim: ClassVar[int] = 2
    trainable: ClassVar[bool] = True
    uses_circuit: ClassVar[bool] = True

    def __init__(self, simulator: Optional[CircuitSimulator] = None,
                 gradient_mode: GradientMode = "parameter_shift"):
        self.simulator = simulator or StatevectorSimulator()
        self.gradient_mode = gradient_mode

    @property
    @abstractmethod
    def n_params(self) -> int:
        pass

    @abstractmethod
    def init_params(self, rng: np.random.Generator) -> np.ndarray:
        """Seeded initial parameter vector."""
        pass

    @abstractmethod
    def score(self, params: np.ndarray, features: Sequence[float]) -> float:
        """Class-1 score in [0, 1]."""
        pass

    @abstractmethod
    def score_and_grad(self, params: np.ndarray, features: Sequence[float]) -> Tuple[float, np.ndarray]:
        """Score and its gradient with respect to params."""
        pass

    @abstractmethod
    def block_shapes(self) -> Dict[str, Tuple[int, ...]]:
        """Named parameter blocks in vector order."""
        pass

    def project(self, params: np.ndarray) -> np.ndarray:
        return params

    def fit(self, features: np.ndarray, labels: np.ndarray) -> np.ndarray:
        raise UnsupportedModelError(f"{self.name} is trained by gradient descent, not fitted")

    def options(self) -> Dict[str, str]:
        """Constructor options needed to rebuild the model."""
        return {}

    def with_simulator(self, simulator: CircuitSimulator) -> "SentimentModel":
        clone = copy.copy(self)
        clone.simulator = simulator
        return clone

    def param_blocks(self, params: np.ndarray) -> Dict[str, np.ndarray]:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise LengthMismatchError(f"{self.name} expects {self.n_params} parameters, got {params.size}")
        blocks = {}
        offset = 0
        for name, shape in self.block_shapes().items():
            size = int(np.prod(shape))
            blocks[name] = params[offset:offset + size].reshape(shape)
            offset += size
        return blocks

    def from_blocks(self, blocks: Mapping[str, np.ndarray]) -> np.ndarray:
        parts = []
        for name, shape in self.block_shapes().items():
            if name not in blocks:
                raise CheckpointFormatError(f"Missing parameter block {name!r} for {self.name}")
            array = np.asarray(blocks[name], dtype=float)
            if array.size != int(np.prod(shape)):
                raise CheckpointFormatError(
                    f"Block {name!r} has {array.size} values, expected shape {shape}"
                )
            parts.append(array.reshape(-1))
        return np.concatenate(parts)


class QfnnModel(SentimentModel):
    """
    Quantum fuzzy neural network.

    readout="sigmoid" scores sigmoid(<Z0>); readout="qfm" scores the
    class-1 quantum fuzzy measurement probability with the sample's two
    association features as memberships.
    """

    name = "qfnn"

    def __init__(self, spec: Optional[QfnnCircuitSpec] = None, readout: str = "sigmoid", **kwargs):
        super().__init__(**kwargs)
        if readout not in ("sigmoid", "qfm"):
            raise InvalidArgumentError(f"Unknown readout {readout!r}")
        self.spec = spec or QfnnCircuitSpec()
        self.readout = readout
        self.circuit = self.spec.circuit()

    @property
    def n_params(self) -> int:
        return self.spec.param_count

    def block_shapes(self):
        return {"theta": (self.n_params,)}

    def options(self):
        return {
            "readout": self.readout,
            "embedding_axis": self.spec.embedding_axis,
            "fuzzy_block_count": str(self.spec.fuzzy_block_count),
            "cz_after_each_fuzzy_block": str(self.spec.cz_after_each_fuzzy_block).lower(),
            "layer2_extra_ry": str(self.spec.layer2_extra_ry).lower(),
        }

    def init_params(self, rng):
        return QfnnParams.random(rng, self.n_params).theta

    def expectation(self, params: np.ndarray, features: Sequence[float]) -> float:
        angles = angle_scale(np.asarray(features, dtype=float)[:2])
        return self.simulator.expectation(self.circuit, params, angles, 0)

    def _readout(self, expectation: float, features: Sequence[float]) -> Tuple[float, float]:
        """Score and d score / d expectation."""
        if self.readout == "sigmoid":
            score = float(sigmoid(expectation))
            return score, score * (1.0 - score)
        mu0, mu1 = (max(float(f), 0.0) for f in np.asarray(features)[:2])
        if mu0 + mu1 <= 0:
            return 0.5, 0.0
        p0 = (1.0 + expectation) / 2
        p1 = 1.0 - p0
        a = (mu0 * p0) ** 2
        b = (mu1 * p1) ** 2
        if a + b <= 0:
            return 0.5, 0.0
        da = mu0 ** 2 * p0
        db = -(mu1 ** 2) * p1
        return b / (a + b), (db * a - b * da) / (a + b) ** 2

    def score(self, params, features):
        return self._readout(self.expectation(params, features), features)[0]

    def score_and_grad(self, params, features):
        angles = angle_scale(np.asarray(features, dtype=float)[:2])
        values, d_params, _ = circuit_gradients(
            self.circuit, self.simulator, params, angles, mode=self.gradient_mode
        )
        score, d_score = self._readout(values[0], features)
        return score, d_score * d_params[:, 0]


class QnnModel(QfnnModel):
    """The QFNN circuit without its fuzzy layer."""

    name = "qnn"

    def __init__(self, spec: Optional[QfnnCircuitSpec] = None, **kwargs):
        base = spec or QfnnCircuitSpec()
        super().__init__(QfnnCircuitSpec(
            embedding_axis=base.embedding_axis,
            fuzzy_block_count=0,
            layer2_extra_ry=base.layer2_extra_ry,
        ), **kwargs)


class HqnnModel(SentimentModel):
    """Hybrid quantum neural network on four features."""

    name = "hqnn"
    input_dim = 4
    use_fuzzy = False

    def __init__(self, ansatz: str = "efficient_su2", feature_map_reps: int = 3,
                 entanglement: str = "full", **kwargs):
        super().__init__(**kwargs)
        if ansatz not in ANSATZ_KINDS:
            raise InvalidArgumentError(f"Unknown ansatz {ansatz!r}")
        self.ansatz = ansatz
        self.feature_map_reps = feature_map_reps
        self.entanglement = entanglement

    def block_shapes(self):
        shapes = {
            "ansatz": (ANSATZ_PARAMS,),
            "dense_weights": (HYBRID_QUBITS, 2 * HYBRID_QUBITS),
            "dense_bias": (HYBRID_QUBITS,),
            "head_weights": (HYBRID_QUBITS,),
            "head_bias": (1,),
        }
        if self.use_fuzzy:
            shapes["centers"] = (HYBRID_QUBITS,)
            shapes["widths"] = (HYBRID_QUBITS,)
        return shapes

    @property
    def n_params(self) -> int:
        return sum(int(np.prod(s)) for s in self.block_shapes().values())

    def options(self):
        return {
            "ansatz": self.ansatz,
            "feature_map_reps": str(self.feature_map_reps),
            "entanglement": self.entanglement,
        }

    def init_params(self, rng):
        blocks = {
            "ansatz": rng.uniform(0.0, math.pi, size=ANSATZ_PARAMS),
            "dense_weights": rng.normal(0.0, 0.5, size=(HYBRID_QUBITS, 2 * HYBRID_QUBITS)),
            "dense_bias": np.zeros(HYBRID_QUBITS),
            "head_weights": rng.normal(0.0, 0.5, size=HYBRID_QUBITS),
            "head_bias": np.zeros(1),
        }
        if self.use_fuzzy:
            blocks["centers"] = rng.uniform(0.0, 1.0, size=HYBRID_QUBITS)
            blocks["widths"] = np.full(HYBRID_QUBITS, 0.5)
        return self.from_blocks(blocks)

    def unpack(self, params: np.ndarray) -> HybridSpec:
        blocks = self.param_blocks(params)
        fuzzy_layer = None
        if self.use_fuzzy:
            fuzzy_layer = GaussianFuzzyLayer(blocks["centers"], blocks["widths"])
        return HybridSpec(
            ansatz_params=blocks["ansatz"],
            dense_weights=blocks["dense_weights"],
            dense_bias=blocks["dense_bias"],
            head_weights=blocks["head_weights"],
            head_bias=float(blocks["head_bias"][0]),
            fuzzy_layer=fuzzy_layer,
            feature_map_reps=self.feature_map_reps,
            entanglement=self.entanglement,
            ansatz=self.ansatz,
        )

    def score(self, params, features):
        return _hybrid_pass(self.unpack(params), features, self.simulator, self.use_fuzzy)[0]

    def score_and_grad(self, params, features):
        score, grads = _hybrid_pass(
            self.unpack(params), features, self.simulator, self.use_fuzzy,
            want_grad=True, mode=self.gradient_mode,
        )
        return score, self.from_blocks(grads)


class HfnnModel(HqnnModel):
    """Hybrid fuzzy neural network: Gaussian memberships feed the HQNN."""

    name = "hfnn"
    use_fuzzy = True
    min_width = 1e-3

    def project(self, params):
        blocks = self.param_blocks(params)
        if np.all(blocks["widths"] >= self.min_width):
            return params
        blocks = {k: v.copy() for k, v in blocks.items()}
        blocks["widths"] = np.maximum(blocks["widths"], self.min_width)
        return self.from_blocks(blocks)


class AnnModel(SentimentModel):
    """2-4-1 classical baseline."""

    name = "ann"
    uses_circuit = False

    def __init__(self, activation: str = "tanh", **kwargs):
        super().__init__(**kwargs)
        if activation not in ("tanh", "relu"):
            raise InvalidArgumentError(f"Unknown hidden activation {activation!r}")
        self.activation = activation

    @property
    def n_params(self) -> int:
        return 17

    def block_shapes(self):
        return {"hidden_weights": (2, 4), "hidden_bias": (4,), "output_weights": (4,), "output_bias": (1,)}

    def options(self):
        return {"activation": self.activation}

    def init_params(self, rng):
        return self.from_blocks({
            "hidden_weights": rng.normal(0.0, 0.5, size=(2, 4)),
            "hidden_bias": np.zeros(4),
            "output_weights": rng.normal(0.0, 0.5, size=4),
            "output_bias": np.zeros(1),
        })

    def unpack(self, params: np.ndarray) -> AnnParams:
        blocks = self.param_blocks(params)
        return AnnParams(blocks["hidden_weights"], blocks["hidden_bias"],
                         blocks["output_weights"], float(blocks["output_bias"][0]))

    def score(self, params, features):
        return ann_forward(self.unpack(params), np.asarray(features, dtype=float)[:2], self.activation)

    def score_and_grad(self, params, features):
        p = self.unpack(params)
        x = np.asarray(features, dtype=float)[:2]
        pre = x @ p.hidden_weights + p.hidden_bias
        hidden = ACTIVATIONS[self.activation](pre)
        score = float(sigmoid(hidden @ p.output_weights + p.output_bias))
        d_out = score * (1.0 - score)
        d_pre = d_out * p.output_weights * _activation_grad(self.activation, pre, hidden)
        return score, self.from_blocks({
            "hidden_weights": np.outer(x, d_pre),
            "hidden_bias": d_pre,
            "output_weights": d_out * hidden,
            "output_bias": np.array([d_out]),
        })


class CfModel(SentimentModel):
    """Classical fuzzy grid classifier; parameters are the nine consequents."""

    name = "cf"
    trainable = False
    uses_circuit = False

    def __init__(self, consequent_mode: str = "fraction", and_op: str = "min", **kwargs):
        super().__init__(**kwargs)
        self.consequent_mode = consequent_mode
        self.operators = FuzzyOperators(and_op=and_op)

    @property
    def n_params(self) -> int:
        return 9

    def block_shapes(self):
        return {"consequents": (9,)}

    def options(self):
        return {"consequent_mode": self.consequent_mode, "and_op": self.operators.and_op}

    def init_params(self, rng):
        return np.full(9, 0.5)

    def fit(self, features, labels):
        rules = build_cf_rulebase(np.asarray(features)[:, :2], labels, self.consequent_mode)
        return np.array([r.consequent for r in rules])

    def rulebase(self, params: np.ndarray):
        return grid_rulebase(params)

    def score(self, params, features):
        return cf_score(np.asarray(features, dtype=float)[:2], self.rulebase(params), self.operators)

    def score_and_grad(self, params, features):
        raise UnsupportedModelError("The CF baseline has no gradient")


_MODEL_CLASSES = {
    "qfnn": QfnnModel,
    "qnn": QnnModel,
    "hqnn": HqnnModel,
    "hfnn": HfnnModel,
    "ann": AnnModel,
    "cf": CfModel,
}

_BOOL_OPTIONS = ("cz_after_each_fuzzy_block", "layer2_extra_ry")
_INT_OPTIONS = ("fuzzy_block_count", "feature_map_reps")


def build_model(name: str, simulator: Optional[CircuitSimulator] = None,
                gradient_mode: GradientMode = "parameter_shift", **options: Any) -> SentimentModel:
    """
    Create a model by name from string or typed options.

    Unknown option keys for the chosen model are ignored so one flat
    experiment config can drive every model.
    """
    if name not in _MODEL_CLASSES:
        raise UnsupportedModelError(f"Unknown model {name!r}", {"choices": list(MODEL_NAMES)})
    options = {k: v for k, v in options.items() if v is not None}
    for key in _BOOL_OPTIONS:
        if isinstance(options.get(key), str):
            options[key] = options[key].lower() in ("1", "true", "yes")
    for key in _INT_OPTIONS:
        if key in options:
            options[key] = int(options[key])

    common = {"simulator": simulator, "gradient_mode": gradient_mode}
    if name in ("qfnn", "qnn"):
        spec_keys = ("embedding_axis", "fuzzy_block_count", "cz_after_each_fuzzy_block", "layer2_extra_ry")
        spec = QfnnCircuitSpec(**{k: options[k] for k in spec_keys if k in options})
        kwargs = {"readout": options["readout"]} if "readout" in options and name == "qfnn" else {}
        return _MODEL_CLASSES[name](spec=spec, **kwargs, **common)
    if name in ("hqnn", "hfnn"):
        keys = ("ansatz", "feature_map_reps", "entanglement")
        return _MODEL_CLASSES[name](**{k: options[k] for k in keys if k in options}, **common)
    if name == "ann":
        return AnnModel(**({"activation": options["activation"]} if "activation" in options else {}), **common)
    keys = ("consequent_mode", "and_op")
    return CfModel(**{k: options[k] for k in keys if k in options}, **common)
