import numpy as np
import pytest

from wfqae.feedback import FeedbackConfig, FeedbackMode
from wfqae.models import build_lih_hamiltonian, build_paper_controls
from wfqae.pauli import PauliString, PauliSum
from wfqae.statevector import prepare_pm_state

LIH_INITIAL_SIGNS = ["-++", "--+", "+-+", "++-"]
LIH_WEIGHTS = [8.0, 6.0, 4.0, 2.0]


def random_pauli_sum(rng: np.random.Generator, n_qubits: int, n_terms: int) -> PauliSum:
    dim = 1 << n_qubits
    terms = [
        (rng.normal(), PauliString(n_qubits, int(rng.integers(dim)), int(rng.integers(dim))))
        for _ in range(n_terms)
    ]
    return PauliSum(n_qubits, terms)


def random_unit_vector(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    v = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def lih():
    return build_lih_hamiltonian()


@pytest.fixture
def lih_controls():
    return build_paper_controls()


@pytest.fixture
def lih_initials():
    return [prepare_pm_state(3, signs) for signs in LIH_INITIAL_SIGNS]


@pytest.fixture
def lih_feedback():
    return FeedbackConfig(
        dt=0.05,
        gains=[1.0, 1.0, 1.0],
        weights=LIH_WEIGHTS,
        mode=FeedbackMode.WEIGHTED_FULL,
        alpha_init=[0.0, 0.0, 0.0],
    )
