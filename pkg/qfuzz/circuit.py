"""
QFuzz Sentiment - Circuit Templates
===================================

A circuit is an immutable list of operations grouped in layers. Each
operation names a gate, its target qubits and, for rotations, where its
angle comes from: a trainable parameter, an input feature, or both.

    angle = offset + params[param] + scale * encode(inputs[features])

Encodings:
    LINEAR  scale * x_i
    ZZ      scale * (pi - x_i) * (pi - x_j)

Shifts (used by the parameter-shift rule) are added per operation index,
so parameters shared across several gates can be shifted one occurrence
at a time.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidAngleError, LengthMismatchError, UnknownLabelError
from .qsim import (
    Gate,
    StateVector,
    apply_gate,
    make_controlled_rotation,
    make_rotation,
    make_standard_gate,
)

ROTATION_LABELS = ("RX", "RY", "RZ")
CONTROLLED_ROTATION_LABELS = ("CRX", "CRY", "CRZ")


class Encoding(str, Enum):
    """How input features enter a rotation angle."""
    LINEAR = "linear"
    ZZ = "zz"


@dataclass(frozen=True)
class Operation:
    """One gate placement inside a circuit template."""
    label: str
    targets: Tuple[int, ...]
    param: Optional[int] = None
    features: Tuple[int, ...] = ()
    encoding: Encoding = Encoding.LINEAR
    scale: float = 1.0
    offset: float = 0.0
    layer: int = 0

    @property
    def is_rotation(self) -> bool:
        return self.label in ROTATION_LABELS

    @property
    def is_parametrized(self) -> bool:
        return self.param is not None or bool(self.features)

    def angle(self, params: np.ndarray, inputs: np.ndarray) -> float:
        value = self.offset
        if self.param is not None:
            value += params[self.param]
        if self.features:
            if self.encoding is Encoding.LINEAR:
                value += self.scale * inputs[self.features[0]]
            else:
                i, j = self.features
                value += self.scale * (math.pi - inputs[i]) * (math.pi - inputs[j])
        return float(value)

    def input_gradient(self, inputs: np.ndarray) -> Dict[int, float]:
        """d(angle)/d(input) for each feature feeding this operation."""
        if not self.features:
            return {}
        if self.encoding is Encoding.LINEAR:
            return {self.features[0]: self.scale}
        i, j = self.features
        return {
            i: -self.scale * (math.pi - inputs[j]),
            j: -self.scale * (math.pi - inputs[i]),
        }

    def gate(self, angle: Optional[float] = None) -> Gate:
        if self.label in ROTATION_LABELS:
            return make_rotation(self.label[1].lower(), angle)
        if self.label in CONTROLLED_ROTATION_LABELS:
            return make_controlled_rotation(self.label[2].lower(), angle)
        if angle is not None:
            raise UnknownLabelError(f"Gate {self.label} takes no angle")
        return make_standard_gate(self.label)


@dataclass(frozen=True)
class Circuit:
    """Parametrized circuit template."""
    n_qubits: int
    operations: Tuple[Operation, ...]
    n_params: int
    n_inputs: int
    name: str = "circuit"
    _bound: Dict[str, tuple] = field(default_factory=dict, init=False, repr=False, compare=False)

    def layers(self) -> List[List[int]]:
        """Operation indices grouped by layer, in layer order."""
        grouped: Dict[int, List[int]] = {}
        for index, op in enumerate(self.operations):
            grouped.setdefault(op.layer, []).append(index)
        return [grouped[layer] for layer in sorted(grouped)]

    def occurrences(self, param: int) -> List[int]:
        """Indices of operations driven by a given parameter."""
        return [i for i, op in enumerate(self.operations) if op.param == param]

    def check_arguments(self, params: np.ndarray, inputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        params = np.asarray(params, dtype=float)
        inputs = np.asarray(inputs, dtype=float)
        if params.shape != (self.n_params,):
            raise LengthMismatchError(
                f"{self.name} expects {self.n_params} parameter(s), got {params.size}"
            )
        if inputs.shape != (self.n_inputs,):
            raise LengthMismatchError(
                f"{self.name} expects {self.n_inputs} input(s), got {inputs.size}"
            )
        if not (np.all(np.isfinite(params)) and np.all(np.isfinite(inputs))):
            raise InvalidAngleError(f"{self.name} received non-finite parameters or inputs")
        return params, inputs

    def bind(self, params: Sequence[float], inputs: Sequence[float],
             shifts: Optional[Mapping[int, float]] = None) -> List[Tuple[Operation, Gate]]:
        """
        Resolve every operation to a concrete gate.

        The unshifted binding of the most recent (params, inputs) pair is
        kept, so a shifted call only rebuilds the shifted operations.
        """
        params, inputs = self.check_arguments(params, inputs)
        key = (params.tobytes(), inputs.tobytes())
        cached = self._bound.get("last")
        if cached is not None and cached[0] == key:
            base = cached[1]
        else:
            base = tuple((op, self._bind_operation(op, params, inputs, 0.0)) for op in self.operations)
            self._bound["last"] = (key, base)
        bound = list(base)
        for index, shift in (shifts or {}).items():
            if not 0 <= index < len(bound):
                continue
            op = self.operations[index]
            if op.is_parametrized or op.label in ROTATION_LABELS + CONTROLLED_ROTATION_LABELS:
                bound[index] = (op, self._bind_operation(op, params, inputs, shift))
        return bound

    @staticmethod
    def _bind_operation(op: Operation, params: np.ndarray, inputs: np.ndarray, shift: float) -> Gate:
        if op.is_parametrized or op.label in ROTATION_LABELS + CONTROLLED_ROTATION_LABELS:
            return op.gate(op.angle(params, inputs) + shift)
        return op.gate()


def run_statevector(circuit: Circuit, params: Sequence[float], inputs: Sequence[float],
                    shifts: Optional[Mapping[int, float]] = None,
                    initial: Optional[StateVector] = None) -> StateVector:
    """Evolve |0...0> (or a given initial state) through the bound circuit."""
    state = initial if initial is not None else StateVector.zero(circuit.n_qubits)
    for op, gate in circuit.bind(params, inputs, shifts):
        state = apply_gate(state, gate, op.targets)
    return state
