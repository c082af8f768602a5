"""
QFuzz Sentiment - Simulator Backends
====================================

This module defines the abstract simulator interface used by the models
and the two implementations behind it:

- StatevectorSimulator: exact pure-state evolution (noiseless)
- DensityMatrixSimulator: density-matrix evolution with an optional
  Kraus channel inserted per NoisePlacement

Models only talk to CircuitSimulator, so any model with a circuit can be
evaluated noiselessly or under noise by swapping the simulator.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np

from .channels import KrausChannel, NoisePlacement, evolve_density
from .circuit import Circuit, run_statevector
from .errors import NonRotationParameterError
from .qsim import (
    EMBED_MAX_QUBITS,
    StateVector,
    embed_gate,
    expectation_z_all,
    expectation_z_density_all,
    z_sign_matrix,
)

logger = logging.getLogger(__name__)


class CircuitSimulator(ABC):
    """
    Abstract base class for circuit evaluation backends.

    All backends return Z expectations for every qubit of the circuit.
    """

    name: str = "simulator"

    @abstractmethod
    def expectations(self, circuit: Circuit, params: Sequence[float], inputs: Sequence[float],
                     shifts: Optional[Mapping[int, float]] = None) -> np.ndarray:
        """
        Evaluate <Z_q> for every qubit q.

        Args:
            circuit: Circuit template
            params: Trainable parameter vector
            inputs: Input angle vector
            shifts: Optional per-operation angle shifts

        Returns:
            np.ndarray: Expectations indexed by qubit
        """
        pass

    def expectation(self, circuit: Circuit, params: Sequence[float], inputs: Sequence[float],
                    qubit: int = 0, shifts: Optional[Mapping[int, float]] = None) -> float:
        return float(self.expectations(circuit, params, inputs, shifts)[qubit])

    def shifted_expectations(self, circuit: Circuit, params: Sequence[float], inputs: Sequence[float],
                             op_indices: Sequence[int], shift: float) -> np.ndarray:
        """
        Evaluate <Z_q> with each listed operation shifted by +shift, then -shift.

        Returns:
            np.ndarray: Shape (len(op_indices), 2, n_qubits)
        """
        out = np.empty((len(op_indices), 2, circuit.n_qubits))
        for row, index in enumerate(op_indices):
            out[row, 0] = self.expectations(circuit, params, inputs, {index: shift})
            out[row, 1] = self.expectations(circuit, params, inputs, {index: -shift})
        return out

    @abstractmethod
    def get_status(self) -> Dict[str, Any]:
        """
        Describe the backend.

        Returns:
            dict: Status information
        """
        pass


class StatevectorSimulator(CircuitSimulator):
    """Noiseless pure-state backend."""

    name = "statevector"

    def expectations(self, circuit, params, inputs, shifts=None) -> np.ndarray:
        state = run_statevector(circuit, params, inputs, shifts)
        return expectation_z_all(state)

    def shifted_expectations(self, circuit, params, inputs, op_indices, shift) -> np.ndarray:
        n = circuit.n_qubits
        if n > EMBED_MAX_QUBITS:
            return super().shifted_expectations(circuit, params, inputs, op_indices, shift)
        params, inputs = circuit.check_arguments(params, inputs)
        operators = [embed_gate(gate.matrix, op.targets, n) for op, gate in circuit.bind(params, inputs)]

        # before[k]: state entering operation k; after[k]: product of everything past k
        before = [StateVector.zero(n).amps]
        for operator in operators[:-1]:
            before.append(operator @ before[-1])
        after = [None] * len(operators)
        acc = np.eye(1 << n, dtype=complex)
        for k in range(len(operators) - 1, -1, -1):
            after[k] = acc
            acc = acc @ operators[k]

        signs = z_sign_matrix(n)
        out = np.empty((len(op_indices), 2, n))
        for row, index in enumerate(op_indices):
            op = circuit.operations[index]
            angle = op.angle(params, inputs)
            for col, delta in enumerate((shift, -shift)):
                shifted = embed_gate(op.gate(angle + delta).matrix, op.targets, n)
                amps = after[index] @ (shifted @ before[index])
                out[row, col] = signs @ (np.abs(amps) ** 2)
        return out

    def get_status(self) -> Dict[str, Any]:
        return {"backend": self.name, "noise": None}


class DensityMatrixSimulator(CircuitSimulator):
    """
    Mixed-state backend with optional noise.

    Example:
        simulator = DensityMatrixSimulator(make_channel("DP", 0.1))
        simulator.expectation(circuit, params, angles)
    """

    name = "density_matrix"

    def __init__(self, channel: Optional[KrausChannel] = None,
                 placement: Optional[NoisePlacement] = None):
        self.channel = channel
        self.placement = placement or NoisePlacement()
        if channel is not None:
            logger.debug(
                f"DensityMatrixSimulator: {channel.label.value} p={channel.p} "
                f"({self.placement.mode.value})"
            )

    def expectations(self, circuit, params, inputs, shifts=None) -> np.ndarray:
        rho = evolve_density(circuit, params, inputs, self.channel, self.placement, shifts)
        return expectation_z_density_all(rho)

    def get_status(self) -> Dict[str, Any]:
        noise = None
        if self.channel is not None:
            noise = {
                "channel": self.channel.label.value,
                "p": self.channel.p,
                "placement": self.placement.mode.value,
                "qubits": self.placement.qubits if self.placement.qubits == "all"
                else list(self.placement.qubits),
            }
        return {"backend": self.name, "noise": noise}


@dataclass(frozen=True)
class CircuitObservable:
    """
    A circuit with fixed inputs viewed as a function of its parameters.

    Calling it returns <Z> on the observed qubit; shifts address single
    operations so shared parameters can be differentiated per occurrence.
    """
    circuit: Circuit
    inputs: np.ndarray
    simulator: CircuitSimulator
    qubit: int = 0

    def __call__(self, params: Sequence[float], shifts: Optional[Mapping[int, float]] = None) -> float:
        return self.simulator.expectation(self.circuit, params, self.inputs, self.qubit, shifts)

    def occurrences(self, index: int) -> List[int]:
        found = self.circuit.occurrences(index)
        for op_index in found:
            op = self.circuit.operations[op_index]
            if not op.is_rotation:
                raise NonRotationParameterError(
                    f"Parameter {index} drives non-rotation gate {op.label}",
                    {"param": index, "operation": op_index},
                )
        return found
