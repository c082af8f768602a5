"""
QFuzz Sentiment - Noise Channels
================================

Single-qubit Kraus channels and their placement inside a circuit:

    BF   bit flip          {sqrt(1-p) I, sqrt(p) X}
    PF   phase flip        {sqrt(1-p) I, sqrt(p) Z}
    BPF  bit-phase flip    {sqrt(1-p) I, sqrt(p) Y}
    DP   depolarizing      {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}
    AD   amplitude damping {[[1,0],[0,sqrt(1-g)]], [[0,sqrt(g)],[0,0]]}
    PD   phase damping     {[[1,0],[0,sqrt(1-g)]], [[0,0],[0,sqrt(g)]]}
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .circuit import Circuit
from .errors import ProbabilityRangeError, QubitIndexError, UnknownLabelError
from .qsim import (
    DTYPE,
    DensityMatrix,
    StateVector,
    apply_gate_density,
    conjugate_density,
    expectation_z_density,
    make_standard_gate,
    to_density,
)

logger = logging.getLogger(__name__)

DEFAULT_NOISE_GRID: Tuple[float, ...] = tuple(round(0.1 * i, 1) for i in range(10))


class ChannelLabel(str, Enum):
    """Supported noise models."""
    BF = "BF"
    PF = "PF"
    BPF = "BPF"
    DP = "DP"
    AD = "AD"
    PD = "PD"


class PlacementMode(str, Enum):
    """Where channels are inserted in the circuit."""
    AFTER_EACH_LAYER = "after_each_layer"
    AFTER_EACH_GATE = "after_each_gate"
    FINAL_ONLY = "final_only"


@dataclass(frozen=True)
class KrausChannel:
    """A completeness-satisfying set of 2x2 Kraus operators."""
    label: ChannelLabel
    p: float
    operators: Tuple[np.ndarray, ...]

    def completeness_error(self) -> float:
        """max |sum K^dagger K - I|."""
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(2))))

    @property
    def is_identity(self) -> bool:
        return len(self.operators) == 1 and bool(np.allclose(self.operators[0], np.eye(2)))


@dataclass(frozen=True)
class NoisePlacement:
    """Insertion mode plus the qubits the channel acts on."""
    mode: PlacementMode = PlacementMode.AFTER_EACH_LAYER
    qubits: Union[str, Tuple[int, ...]] = "all"

    def __post_init__(self):
        object.__setattr__(self, "mode", PlacementMode(self.mode))
        if self.qubits != "all":
            object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))

    def resolve(self, n_qubits: int) -> Tuple[int, ...]:
        if self.qubits == "all":
            return tuple(range(n_qubits))
        for q in self.qubits:
            if not 0 <= q < n_qubits:
                raise QubitIndexError(
                    f"Noise qubit {q} out of range for {n_qubits} qubit(s)",
                    {"qubit": q, "n_qubits": n_qubits},
                )
        return tuple(self.qubits)


def _pauli(label: str) -> np.ndarray:
    return np.asarray(make_standard_gate(label).matrix)


def make_channel(label: Union[str, ChannelLabel], p: float) -> KrausChannel:
    """
    Build the standard Kraus set for a noise model.

    Args:
        label: One of BF, PF, BPF, DP, AD, PD
        p: Error probability (damping rate for AD/PD), in [0, 1]

    Raises:
        UnknownLabelError: For an unknown channel name
        ProbabilityRangeError: If p is outside [0, 1]
    """
    try:
        label = ChannelLabel(str(getattr(label, "value", label)).upper())
    except ValueError:
        raise UnknownLabelError(f"Unknown channel label: {label!r}", {"label": str(label)}) from None

    p = float(p)
    if not (math.isfinite(p) and 0.0 <= p <= 1.0):
        raise ProbabilityRangeError(f"Channel probability must be in [0, 1], got {p}", {"p": p})

    identity = np.eye(2, dtype=DTYPE)
    if label in (ChannelLabel.BF, ChannelLabel.PF, ChannelLabel.BPF):
        pauli = _pauli({ChannelLabel.BF: "X", ChannelLabel.PF: "Z", ChannelLabel.BPF: "Y"}[label])
        operators = [math.sqrt(1 - p) * identity, math.sqrt(p) * pauli]
    elif label is ChannelLabel.DP:
        weight = math.sqrt(p / 4)
        operators = [math.sqrt(1 - 3 * p / 4) * identity] + [weight * _pauli(s) for s in "XYZ"]
    elif label is ChannelLabel.AD:
        operators = [
            np.array([[1, 0], [0, math.sqrt(1 - p)]], dtype=DTYPE),
            np.array([[0, math.sqrt(p)], [0, 0]], dtype=DTYPE),
        ]
    else:
        operators = [
            np.array([[1, 0], [0, math.sqrt(1 - p)]], dtype=DTYPE),
            np.array([[0, 0], [0, math.sqrt(p)]], dtype=DTYPE),
        ]

    # Zero-weight operators contribute nothing
    kept = tuple(k for k in operators if np.any(k != 0))
    logger.debug(f"Channel {label.value} p={p} with {len(kept)} Kraus operator(s)")
    return KrausChannel(label, p, kept)


def apply_channel(rho: DensityMatrix, ch: KrausChannel, qubit: int) -> DensityMatrix:
    """rho' = sum_i K_i rho K_i^dagger on one qubit."""
    if not 0 <= qubit < rho.n_qubits:
        raise QubitIndexError(
            f"Qubit index {qubit} out of range for {rho.n_qubits} qubit(s)",
            {"qubit": qubit, "n_qubits": rho.n_qubits},
        )
    if ch.is_identity:
        return rho
    entries = sum(conjugate_density(rho, k, [qubit]).entries for k in ch.operators)
    return DensityMatrix(rho.n_qubits, entries)


def _apply_to_qubits(rho: DensityMatrix, ch: KrausChannel, qubits: Sequence[int]) -> DensityMatrix:
    for q in qubits:
        rho = apply_channel(rho, ch, q)
    return rho


def evolve_density(circuit: Circuit, params: Sequence[float], input_angles: Sequence[float],
                   ch: Optional[KrausChannel] = None,
                   placement: Optional[NoisePlacement] = None,
                   shifts: Optional[Mapping[int, float]] = None,
                   initial: Optional[DensityMatrix] = None) -> DensityMatrix:
    """
    Run a circuit on density matrices, inserting the channel per placement.

    With no channel this is the noiseless density-matrix path.
    """
    placement = placement or NoisePlacement()
    noisy_qubits = placement.resolve(circuit.n_qubits)
    noisy = ch is not None and not ch.is_identity

    rho = initial if initial is not None else to_density(StateVector.zero(circuit.n_qubits))
    bound = circuit.bind(params, input_angles, shifts)

    for layer in circuit.layers():
        for index in layer:
            op, gate = bound[index]
            rho = apply_gate_density(rho, gate, op.targets)
            if noisy and placement.mode is PlacementMode.AFTER_EACH_GATE:
                rho = _apply_to_qubits(rho, ch, [q for q in op.targets if q in noisy_qubits])
        if noisy and placement.mode is PlacementMode.AFTER_EACH_LAYER:
            rho = _apply_to_qubits(rho, ch, noisy_qubits)

    if noisy and placement.mode is PlacementMode.FINAL_ONLY:
        rho = _apply_to_qubits(rho, ch, noisy_qubits)
    return rho


def noisy_expectation(circuit: Circuit, params: Sequence[float], input_angles: Sequence[float],
                      ch: Optional[KrausChannel] = None,
                      placement: Optional[NoisePlacement] = None,
                      qubit_observed: int = 0) -> float:
    """Z expectation on one qubit after noisy density-matrix evolution."""
    rho = evolve_density(circuit, params, input_angles, ch, placement)
    return expectation_z_density(rho, qubit_observed)
