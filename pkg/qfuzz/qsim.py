"""
QFuzz Sentiment - Small-Qubit Simulator
=======================================

Exact dense simulation of pure states (statevector) and mixed states
(density matrix) with the gate set the sentiment circuits use.

Conventions:
    - Little-endian qubit order: qubit 0 is the least-significant bit of
      the basis-state index.
    - A k-qubit gate applied on targets (t0, ..., tk-1) reads its local
      basis index with t0 as the most-significant bit, so a controlled
      gate on (control, target) is |0><0| (x) I + |1><1| (x) U.
    - Global phase is kept as computed.

All functions are pure: inputs are never mutated.
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from .errors import (
    ArityMismatchError,
    InvalidAngleError,
    QubitIndexError,
    UnknownLabelError,
)

DTYPE = np.complex128
MAX_QUBITS = 8
# Circuits up to this width apply gates as embedded dense operators.
EMBED_MAX_QUBITS = 4

_SQRT2_INV = 1.0 / math.sqrt(2.0)
_T_PHASE = cmath.exp(1j * math.pi / 4)

_STANDARD_MATRICES = {
    "I": [[1, 0], [0, 1]],
    "X": [[0, 1], [1, 0]],
    "Y": [[0, -1j], [1j, 0]],
    "Z": [[1, 0], [0, -1]],
    "H": [[_SQRT2_INV, _SQRT2_INV], [_SQRT2_INV, -_SQRT2_INV]],
    "S": [[1, 0], [0, 1j]],
    "Sdg": [[1, 0], [0, -1j]],
    "T": [[1, 0], [0, _T_PHASE]],
    "Tdg": [[1, 0], [0, _T_PHASE.conjugate()]],
    "CZ": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]],
    "CX": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
}

SINGLE_QUBIT_LABELS = ("X", "Y", "Z", "I", "H", "S", "Sdg", "T", "Tdg")
ROTATION_AXES = ("x", "y", "z")


# ==========================================
# Domain Types
# ==========================================

@dataclass(frozen=True)
class Gate:
    """
    A unitary acting on one or two qubits.

    Attributes:
        arity: Number of qubits the gate acts on (1 or 2)
        matrix: 2^arity x 2^arity complex matrix
        label: Human-readable gate name
    """
    arity: int
    matrix: np.ndarray
    label: str

    def is_unitary(self, atol: float = 1e-12) -> bool:
        """Check U^dagger U = I within atol."""
        dim = 1 << self.arity
        product = self.matrix.conj().T @ self.matrix
        return bool(np.allclose(product, np.eye(dim), atol=atol, rtol=0.0))


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes of an n-qubit pure state."""
    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise QubitIndexError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        if self.amps.shape != (1 << self.n_qubits,):
            raise ArityMismatchError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {self.amps.shape}"
            )

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        """The all-zeros computational basis state."""
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        """Computational basis state |index>."""
        amps = np.zeros(1 << n_qubits, dtype=DTYPE)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amps: Sequence[complex], normalize: bool = True) -> "StateVector":
        """Build a state from raw amplitudes, normalizing by default."""
        vector = np.asarray(amps, dtype=DTYPE)
        n_qubits = int(round(math.log2(vector.size)))
        if normalize:
            vector = vector / np.linalg.norm(vector)
        return cls(n_qubits, vector)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semi-definite, trace-1 operator on n qubits."""
    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        dim = 1 << self.n_qubits
        if self.entries.shape != (dim, dim):
            raise ArityMismatchError(f"expected {dim}x{dim} matrix, got {self.entries.shape}")

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        dim = 1 << n_qubits
        return cls(n_qubits, np.eye(dim, dtype=DTYPE) / dim)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def purity(self) -> float:
        """Tr(rho^2)."""
        return float(np.real(np.trace(self.entries @ self.entries)))

    def min_eigenvalue(self) -> float:
        hermitian = (self.entries + self.entries.conj().T) / 2
        return float(np.min(np.linalg.eigvalsh(hermitian)))

    def is_hermitian(self, atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, atol=atol, rtol=0.0))


# ==========================================
# Complex amplitudes
# ==========================================

def polar_amplitude(z: complex) -> Tuple[float, float]:
    """Polar form (r, theta) with r >= 0 and theta in (-pi, pi]."""
    r, theta = cmath.polar(complex(z))
    if theta <= -math.pi:
        theta += 2 * math.pi
    return r, theta


def amplitude_from_polar(r: float, theta: float) -> complex:
    return cmath.rect(r, theta)


# ==========================================
# Gate construction
# ==========================================

@lru_cache(maxsize=None)
def make_standard_gate(label: str) -> Gate:
    """
    Return a fixed gate by name.

    Args:
        label: One of X, Y, Z, I, H, S, Sdg, T, Tdg (single-qubit) or CZ, CX

    Raises:
        UnknownLabelError: If the label is not a known gate
    """
    if label not in _STANDARD_MATRICES:
        raise UnknownLabelError(f"Unknown gate label: {label!r}", {"label": label})
    matrix = np.array(_STANDARD_MATRICES[label], dtype=DTYPE)
    matrix.setflags(write=False)
    arity = 1 if matrix.shape[0] == 2 else 2
    return Gate(arity, matrix, label)


def _check_angle(theta: float) -> float:
    theta = float(theta)
    if not math.isfinite(theta):
        raise InvalidAngleError(f"Rotation angle must be finite, got {theta}")
    return theta


def _rotation_matrix(axis: str, theta: float) -> np.ndarray:
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=DTYPE)
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=DTYPE)
    if axis == "z":
        return np.array([[cmath.exp(-0.5j * theta), 0], [0, cmath.exp(0.5j * theta)]], dtype=DTYPE)
    raise UnknownLabelError(f"Unknown rotation axis: {axis!r}", {"axis": axis})


def make_rotation(axis: str, theta: float) -> Gate:
    """R_axis(theta) = exp(-i theta P / 2) for P in {X, Y, Z}."""
    theta = _check_angle(theta)
    return Gate(1, _rotation_matrix(axis, theta), f"R{axis.upper()}")


def make_controlled_rotation(axis: str, theta: float) -> Gate:
    """|0><0| (x) I + |1><1| (x) R_axis(theta)."""
    theta = _check_angle(theta)
    matrix = np.eye(4, dtype=DTYPE)
    matrix[2:, 2:] = _rotation_matrix(axis, theta)
    return Gate(2, matrix, f"CR{axis.upper()}")


# ==========================================
# Tensor plumbing
# ==========================================

def _validate_targets(n_qubits: int, targets: Sequence[int], arity: int) -> Tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(targets) != arity:
        raise ArityMismatchError(
            f"Gate of arity {arity} applied to {len(targets)} target(s)",
            {"targets": list(targets)},
        )
    if len(set(targets)) != len(targets):
        raise ArityMismatchError(f"Targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < n_qubits:
            raise QubitIndexError(
                f"Qubit index {t} out of range for {n_qubits} qubit(s)",
                {"qubit": t, "n_qubits": n_qubits},
            )
    return targets


def _apply_to_axes(tensor: np.ndarray, matrix: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Contract matrix into the given tensor axes (first axis = most significant)."""
    k = len(axes)
    front = list(range(k))
    moved = np.moveaxis(tensor, axes, front)
    shape = moved.shape
    result = (matrix @ moved.reshape(1 << k, -1)).reshape(shape)
    return np.moveaxis(result, front, axes)


@lru_cache(maxsize=None)
def _embedding_index(n_qubits: int, targets: Tuple[int, ...]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local row/column indices and the same-spectator mask for a gate on targets."""
    basis = np.arange(1 << n_qubits)
    arity = len(targets)
    local = np.zeros_like(basis)
    spectators = basis.copy()
    for k, t in enumerate(targets):
        bit = (basis >> t) & 1
        local |= bit << (arity - 1 - k)
        spectators &= ~(1 << t)
    mask = spectators[:, None] == spectators[None, :]
    return local[:, None], local[None, :], mask


def embed_gate(matrix: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """The full 2^n x 2^n operator of a k-qubit matrix acting on targets."""
    arity = int(round(math.log2(matrix.shape[0])))
    targets = _validate_targets(n_qubits, targets, arity)
    return _embed(matrix, targets, n_qubits)


def _embed(matrix: np.ndarray, targets: Tuple[int, ...], n_qubits: int) -> np.ndarray:
    rows, cols, mask = _embedding_index(n_qubits, targets)
    return np.where(mask, matrix[rows, cols], 0).astype(DTYPE, copy=False)


def _check_qubit(n_qubits: int, qubit: int) -> int:
    qubit = int(qubit)
    if not 0 <= qubit < n_qubits:
        raise QubitIndexError(
            f"Qubit index {qubit} out of range for {n_qubits} qubit(s)",
            {"qubit": qubit, "n_qubits": n_qubits},
        )
    return qubit


def _z_signs(n_qubits: int, qubit: int) -> np.ndarray:
    return z_sign_matrix(n_qubits)[qubit]


@lru_cache(maxsize=None)
def z_sign_matrix(n_qubits: int) -> np.ndarray:
    """Row q holds the Z_q eigenvalue of every basis state."""
    bits = (np.arange(1 << n_qubits)[None, :] >> np.arange(n_qubits)[:, None]) & 1
    return 1.0 - 2.0 * bits


# ==========================================
# Statevector operations
# ==========================================

def apply_gate(state: StateVector, gate: Gate, targets: Sequence[int]) -> StateVector:
    """Return (gate embedded on targets) |state>."""
    n = state.n_qubits
    targets = _validate_targets(n, targets, gate.arity)
    if n <= EMBED_MAX_QUBITS:
        return StateVector(n, _embed(gate.matrix, targets, n) @ state.amps)
    tensor = state.amps.reshape([2] * n)
    axes = [n - 1 - t for t in targets]
    result = _apply_to_axes(tensor, gate.matrix, axes)
    return StateVector(n, result.reshape(-1))


def measurement_probabilities(state: StateVector) -> np.ndarray:
    """Born-rule probabilities over the 2^n basis outcomes."""
    return np.abs(state.amps) ** 2


def expectation_z(state: StateVector, qubit: int) -> float:
    """<psi| Z_qubit |psi> = P(qubit = 0) - P(qubit = 1)."""
    qubit = _check_qubit(state.n_qubits, qubit)
    probs = measurement_probabilities(state)
    return float(np.dot(probs, _z_signs(state.n_qubits, qubit)))


def expectation_z_all(state: StateVector) -> np.ndarray:
    """Z expectations for every qubit, indexed by qubit."""
    return z_sign_matrix(state.n_qubits) @ measurement_probabilities(state)


def to_density(state: StateVector) -> DensityMatrix:
    """|psi><psi|."""
    return DensityMatrix(state.n_qubits, np.outer(state.amps, state.amps.conj()))


# ==========================================
# Density-matrix operations
# ==========================================

def conjugate_density(rho: DensityMatrix, matrix: np.ndarray, targets: Sequence[int]) -> DensityMatrix:
    """
    Return M rho M^dagger with M embedded on targets.

    M need not be unitary; Kraus operators go through here too.
    """
    n = rho.n_qubits
    arity = int(round(math.log2(matrix.shape[0])))
    targets = _validate_targets(n, targets, arity)
    if n <= EMBED_MAX_QUBITS:
        full = _embed(matrix, targets, n)
        return DensityMatrix(n, full @ rho.entries @ full.conj().T)
    tensor = rho.entries.reshape([2] * (2 * n))
    row_axes = [n - 1 - t for t in targets]
    col_axes = [2 * n - 1 - t for t in targets]
    tensor = _apply_to_axes(tensor, matrix, row_axes)
    tensor = _apply_to_axes(tensor, matrix.conj(), col_axes)
    dim = 1 << n
    return DensityMatrix(n, tensor.reshape(dim, dim))


def apply_gate_density(rho: DensityMatrix, gate: Gate, targets: Sequence[int]) -> DensityMatrix:
    """rho' = U rho U^dagger."""
    if len(targets) != gate.arity:
        raise ArityMismatchError(f"Gate of arity {gate.arity} applied to {len(targets)} target(s)")
    return conjugate_density(rho, gate.matrix, targets)


def expectation_z_density(rho: DensityMatrix, qubit: int) -> float:
    """Tr(Z_qubit rho)."""
    qubit = _check_qubit(rho.n_qubits, qubit)
    diagonal = np.real(np.diag(rho.entries))
    return float(np.dot(diagonal, _z_signs(rho.n_qubits, qubit)))


def expectation_z_density_all(rho: DensityMatrix) -> np.ndarray:
    return z_sign_matrix(rho.n_qubits) @ np.real(np.diag(rho.entries))
