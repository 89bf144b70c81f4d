"""
wfqae - Spectral Oracle
Dense exact diagonalization for fidelity targets and verification.

The oracle runs on numpy's LAPACK eigh driver and shares nothing with the
evolution engine's propagators, so it stays an independent cross-check.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import DimensionError
from .pauli import DEFAULT_QUBIT_CAP, PauliSum
from .statevector import StateVector

logger = logging.getLogger(__name__)


DEGENERACY_THRESHOLD = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvector columns."""
    n_qubits: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def state(self, level: int) -> StateVector:
        self._check_level(level)
        return StateVector(self.n_qubits, self.eigenvectors[:, level])

    def lowest(self, count: int) -> List[float]:
        return [float(v) for v in self.eigenvalues[:count]]

    def gaps(self) -> np.ndarray:
        """E_{q+1} - E_q for consecutive levels."""
        return np.diff(self.eigenvalues)

    def degenerate_block(self, level: int, threshold: float = DEGENERACY_THRESHOLD) -> Tuple[int, int]:
        """Half-open index range of the eigenspace containing `level`."""
        self._check_level(level)
        values = self.eigenvalues
        start = level
        while start > 0 and values[start] - values[start - 1] < threshold:
            start -= 1
        stop = level + 1
        while stop < len(values) and values[stop] - values[stop - 1] < threshold:
            stop += 1
        return start, stop

    def degeneracy_groups(self, threshold: float = DEGENERACY_THRESHOLD) -> List[List[int]]:
        return degeneracy_groups(self.eigenvalues, threshold)

    def residual(self, h: PauliSum) -> float:
        """max_i ||H v_i - lambda_i v_i||."""
        dense = h.to_dense()
        diff = dense @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return float(np.max(np.linalg.norm(diff, axis=0)))

    def _check_level(self, level: int) -> None:
        if not 0 <= level < len(self.eigenvalues):
            raise IndexError(f"level {level} out of range for {len(self.eigenvalues)} eigenvalues")


def diagonalize(h: PauliSum, cap: int = DEFAULT_QUBIT_CAP) -> Spectrum:
    """Full Hermitian eigendecomposition of h, eigenvalues ascending."""
    dense = h.to_dense(cap)
    eigenvalues, eigenvectors = np.linalg.eigh(dense)
    logger.debug("diagonalized %d-qubit operator: E0=%.12g", h.n_qubits, eigenvalues[0])
    return Spectrum(h.n_qubits, eigenvalues, eigenvectors)


def degeneracy_groups(eigenvalues, threshold: float = DEGENERACY_THRESHOLD) -> List[List[int]]:
    """Group ascending eigenvalue indices whose consecutive gaps are below threshold."""
    groups: List[List[int]] = []
    for i, value in enumerate(eigenvalues):
        if groups and value - eigenvalues[groups[-1][-1]] < threshold:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def fidelity(state: StateVector, spectrum: Spectrum, level: int) -> float:
    """
    Squared overlap of `state` with eigenvector `level`.

    When `level` sits in a degenerate eigenspace the squared norm of the
    projection onto the whole eigenspace is returned instead.
    """
    if state.n_qubits != spectrum.n_qubits:
        raise DimensionError(f"state has {state.n_qubits} qubits, spectrum {spectrum.n_qubits}")
    start, stop = spectrum.degenerate_block(level)
    amplitudes = spectrum.eigenvectors[:, start:stop].conj().T @ state.amplitudes
    return float(np.sum(np.abs(amplitudes) ** 2))


def fidelities(state: StateVector, spectrum: Spectrum, levels) -> List[float]:
    return [fidelity(state, spectrum, level) for level in levels]
