"""
wfqae - Statevector Engine
Exact statevectors and the per-layer unitaries of the digitized evolution.

A layer is U_c(alpha_k) U_d with U_d = exp(-i H_d dt) and
U_c = exp(-i dt sum_j alpha_j H_c,j). Both factors are applied exactly:
generators whose terms each touch a single qubit are exponentiated as 2x2
blocks in place; anything else goes through a Hermitian eigendecomposition
that is computed once per generator and re-phased per angle.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import DimensionError, InvariantError, ParseError
from .pauli import DEFAULT_QUBIT_CAP, PauliSum, check_cap, scale_and_add

logger = logging.getLogger(__name__)


# Drift beyond this is an engine bug, never silently renormalized.
NORM_TOLERANCE = 1e-8

_SINGLE_QUBIT_STATES = {
    "0": (1.0, 0.0),
    "1": (0.0, 1.0),
    "+": (1 / math.sqrt(2), 1 / math.sqrt(2)),
    "-": (1 / math.sqrt(2), -1 / math.sqrt(2)),
}

# Unicode minus shows up in labels pasted from typeset text.
_SIGN_ALIASES = {"−": "-"}


class StateVector:
    """Normalized complex amplitude vector over 2^n basis states (read-only)."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes, tolerance: float = NORM_TOLERANCE):
        if n_qubits < 1:
            raise DimensionError(f"n_qubits must be positive, got {n_qubits}")
        check_cap(n_qubits)
        amps = np.array(amplitudes, dtype=complex)
        if amps.shape != (1 << n_qubits,):
            raise DimensionError(f"expected {1 << n_qubits} amplitudes, got shape {amps.shape}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > tolerance:
            raise InvariantError(f"state norm {norm!r} deviates from 1 by more than {tolerance:g}")
        amps.flags.writeable = False
        self.n_qubits = n_qubits
        self.amplitudes = amps

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        n_qubits = int(round(math.log2(amps.size))) if amps.size else 0
        if amps.size == 0 or (1 << n_qubits) != amps.size:
            raise DimensionError(f"amplitude count {amps.size} is not a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n_qubits, amps)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def allclose(self, other: "StateVector", atol: float = 1e-10) -> bool:
        return self.n_qubits == other.n_qubits and np.allclose(
            self.amplitudes, other.amplitudes, rtol=0.0, atol=atol
        )

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


def _check_dims(a: int, b: int, what: str = "dimension") -> None:
    if a != b:
        raise DimensionError(f"{what} mismatch: {a} vs {b} qubits")


# ============================================================
# STATE PREPARATION
# ============================================================

def prepare_product_state(label: str) -> StateVector:
    """Tensor product of per-qubit states from {0, 1, +, -}; qubit 0 leftmost."""
    label = "".join(_SIGN_ALIASES.get(c, c) for c in label)
    if not label:
        raise ParseError("empty state label")
    vector = np.ones(1, dtype=complex)
    for char in label:
        if char not in _SINGLE_QUBIT_STATES:
            raise ParseError(f"invalid state character {char!r} in {label!r}")
        vector = np.kron(vector, np.array(_SINGLE_QUBIT_STATES[char], dtype=complex))
    return StateVector(len(label), vector)


def prepare_basis_state(n_qubits: int, label: str) -> StateVector:
    """Computational basis state |label>, e.g. (3, '100') -> index 4."""
    if len(label) != n_qubits:
        raise DimensionError(f"label {label!r} has {len(label)} characters, expected {n_qubits}")
    if any(c not in "01" for c in label):
        raise ParseError(f"basis label {label!r} must contain only 0 and 1")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[int(label, 2)] = 1.0
    return StateVector(n_qubits, amps)


def prepare_pm_state(n_qubits: int, signs: str) -> StateVector:
    """Product of |+> and |-> states, e.g. (3, '-++')."""
    signs = "".join(_SIGN_ALIASES.get(c, c) for c in signs)
    if len(signs) != n_qubits:
        raise DimensionError(f"sign string {signs!r} has {len(signs)} characters, expected {n_qubits}")
    if any(c not in "+-" for c in signs):
        raise ParseError(f"sign string {signs!r} must contain only + and -")
    return prepare_product_state(signs)


def parse_state_spec(spec: str, n_qubits: int) -> StateVector:
    """Resolve a config/CLI state label against an expected qubit count."""
    spec = spec.strip()
    normalized = "".join(_SIGN_ALIASES.get(c, c) for c in spec)
    if len(normalized) != n_qubits:
        raise DimensionError(f"state {spec!r} has {len(normalized)} qubits, model has {n_qubits}")
    if set(normalized) <= set("01"):
        return prepare_basis_state(n_qubits, normalized)
    if set(normalized) <= set("+-"):
        return prepare_pm_state(n_qubits, normalized)
    return prepare_product_state(normalized)


# ============================================================
# MEASUREMENT
# ============================================================

def overlap(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    _check_dims(a.n_qubits, b.n_qubits)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def term_expectations(state: StateVector, observable: PauliSum) -> np.ndarray:
    """<P_j> for every string of the observable, in term order."""
    _check_dims(state.n_qubits, observable.n_qubits)
    psi = state.amplitudes
    values = np.empty(len(observable))
    for j, (_, string) in enumerate(observable):
        value = np.vdot(psi, string.apply(psi))
        if abs(value.imag) > 1e-12:
            logger.debug("discarding imaginary residue %.3g on %s", value.imag, string.label)
        values[j] = value.real
    return values


def expectation(state: StateVector, observable: PauliSum) -> float:
    """<state|O|state> aggregated term by term from Pauli-string expectations."""
    if observable.is_empty:
        _check_dims(state.n_qubits, observable.n_qubits)
        return 0.0
    coeffs = np.array([coeff for coeff, _ in observable])
    return float(coeffs @ term_expectations(state, observable))


# ============================================================
# EXPONENTIALS
# ============================================================

def _local_block(angle: float, cx: float, cy: float, cz: float) -> np.ndarray:
    """exp(-i angle (cx X + cy Y + cz Z)) as a 2x2 matrix."""
    r = math.sqrt(cx * cx + cy * cy + cz * cz)
    c = math.cos(angle * r)
    s = math.sin(angle * r) / r
    return np.array(
        [[c - 1j * s * cz, -1j * s * cx - s * cy],
         [-1j * s * cx + s * cy, c + 1j * s * cz]],
        dtype=complex,
    )


class Propagator:
    """
    exp(-i * angle * G) for a fixed Hermitian generator G.

    Single-qubit-local generators factorize into 2x2 blocks; everything else
    is eigendecomposed once and re-phased for each angle.
    """

    def __init__(self, generator: PauliSum, cap: int = DEFAULT_QUBIT_CAP):
        check_cap(generator.n_qubits, cap)
        self.generator = generator
        self.n_qubits = generator.n_qubits
        self._local: Optional[Tuple[float, Dict[int, Tuple[float, float, float]]]] = None
        self._eigvals: Optional[np.ndarray] = None
        self._eigvecs: Optional[np.ndarray] = None
        if generator.is_single_qubit_local():
            self._local = generator.single_qubit_parts()
        else:
            self._eigvals, self._eigvecs = scipy.linalg.eigh(generator.to_dense(cap))

    @property
    def is_local(self) -> bool:
        return self._local is not None

    def _apply_local(self, psi: np.ndarray, angle: float) -> np.ndarray:
        identity, parts = self._local
        tensor = psi.reshape((2,) * self.n_qubits)
        for qubit, (cx, cy, cz) in parts.items():
            if cx == 0.0 and cy == 0.0 and cz == 0.0:
                continue
            block = _local_block(angle, cx, cy, cz)
            tensor = np.moveaxis(np.tensordot(block, tensor, axes=([1], [qubit])), 0, qubit)
        out = tensor.reshape(-1)
        if identity != 0.0:
            out = np.exp(-1j * angle * identity) * out
        return out

    def _apply_dense(self, psi: np.ndarray, angle: float) -> np.ndarray:
        phases = np.exp(-1j * angle * self._eigvals)
        return self._eigvecs @ (phases * (self._eigvecs.conj().T @ psi))

    def apply(self, state: StateVector, angle: float) -> StateVector:
        _check_dims(state.n_qubits, self.n_qubits)
        if angle == 0.0 or self.generator.is_empty:
            return state
        if self._local is not None:
            out = self._apply_local(state.amplitudes, angle)
        else:
            out = self._apply_dense(state.amplitudes, angle)
        return StateVector(self.n_qubits, out)

    def matrix(self, angle: float) -> np.ndarray:
        dim = 1 << self.n_qubits
        if self._local is not None:
            columns = [self._apply_local(np.eye(dim, dtype=complex)[:, i], angle) for i in range(dim)]
            return np.column_stack(columns)
        return (self._eigvecs * np.exp(-1j * angle * self._eigvals)) @ self._eigvecs.conj().T


def apply_generator(state: StateVector, generator: PauliSum, angle: float) -> StateVector:
    """exp(-i * angle * generator)|state>, computed exactly."""
    _check_dims(state.n_qubits, generator.n_qubits)
    if angle == 0.0:
        return state
    return Propagator(generator).apply(state, angle)


# ============================================================
# LAYER UNITARIES
# ============================================================

class LayerKind(Enum):
    DRIFT = "drift"
    CONTROL = "control"


@dataclass
class LayerUnitary:
    """
    One factor of a circuit layer: exp(-i * strength * duration * generator).

    Drift layers use strength 1; a single control uses its alpha as strength.
    """
    kind: LayerKind
    generator: PauliSum
    duration: float
    _propagator: Optional[Propagator] = field(default=None, repr=False, compare=False)

    @property
    def propagator(self) -> Propagator:
        if self._propagator is None:
            self._propagator = Propagator(self.generator)
        return self._propagator

    def apply(self, state: StateVector, strength: float = 1.0) -> StateVector:
        return self.propagator.apply(state, strength * self.duration)

    def matrix(self, strength: float = 1.0) -> np.ndarray:
        return self.propagator.matrix(strength * self.duration)

    def is_unitary(self, strength: float = 1.0, atol: float = 1e-10) -> bool:
        u = self.matrix(strength)
        return bool(np.allclose(u @ u.conj().T, np.eye(u.shape[0]), rtol=0.0, atol=atol))


class ControlStack:
    """
    The control factor U_c(alpha^(1), ..., alpha^(d)) for d control Hamiltonians.

    d == 1 reuses one cached propagator with alpha as strength; d > 1 builds
    sum_j alpha_j H_c,j for each layer and exponentiates it.
    """

    def __init__(self, controls: Sequence[PauliSum], dt: float):
        if not controls:
            raise DimensionError("at least one control Hamiltonian is required")
        n_qubits = controls[0].n_qubits
        for control in controls:
            _check_dims(n_qubits, control.n_qubits, "control")
        self.controls = list(controls)
        self.dt = dt
        self.n_qubits = n_qubits
        self._single = LayerUnitary(LayerKind.CONTROL, self.controls[0], dt) if len(controls) == 1 else None

    def for_layer(self, alphas: Sequence[float]) -> Tuple[LayerUnitary, float]:
        """The (unitary, strength) pair applying this layer's controls."""
        if len(alphas) != len(self.controls):
            raise DimensionError(f"{len(alphas)} control values for {len(self.controls)} controls")
        if self._single is not None:
            return self._single, float(alphas[0])
        combined = scale_and_add([(float(a), c) for a, c in zip(alphas, self.controls)])
        return LayerUnitary(LayerKind.CONTROL, combined, self.dt), 1.0
