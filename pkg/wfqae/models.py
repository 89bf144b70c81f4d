"""
wfqae - Models
Problem builders: the LiH qubit Hamiltonian, its Z+X controls, and seeded
random drift/control pairs for property tests.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, DimensionError
from .pauli import PauliString, PauliSum, check_cap, commutator_i
from .spectrum import diagonalize

logger = logging.getLogger(__name__)


# LiH, STO-6G, R = 2.5 (bond distance in Angstrom), mapped to 3 qubits.
LIH_R25_COEFFICIENTS = (
    -7.0582, 0.0094, -0.2857, -0.347, 0.0152, 0.0152, 0.0102,
    0.0102, 0.1957, 0.2202, 0.0208, 0.0208, 0.2563,
)

# Coefficient g_i multiplies LIH_TERM_LABELS[i]; qubit 0 is the leftmost factor.
# XX/YY pairs on one qubit pair share a coefficient in this ordering.
LIH_TERM_LABELS = (
    "III", "ZII", "IZI", "IIZ", "XXI", "YYI", "XIX",
    "YIY", "ZZI", "ZIZ", "IXX", "IYY", "IZZ",
)

MAX_RANDOM_RETRIES = 100
RANDOM_GAP_THRESHOLD = 1e-6


@dataclass
class LiHCoefficients:
    g: Tuple[float, ...] = LIH_R25_COEFFICIENTS
    bond_distance: float = 2.5
    term_labels: Tuple[str, ...] = field(default=LIH_TERM_LABELS)

    def __post_init__(self):
        self.g = tuple(float(v) for v in self.g)
        if len(self.g) != 13:
            raise DimensionError(f"LiH needs exactly 13 coefficients, got {len(self.g)}")
        if len(self.term_labels) != 13:
            raise DimensionError(f"LiH needs exactly 13 term labels, got {len(self.term_labels)}")


def build_lih_hamiltonian(c: LiHCoefficients = None) -> PauliSum:
    """3-qubit LiH Hamiltonian sum_i g_i S_i."""
    c = c or LiHCoefficients()
    return PauliSum(3, [(g, PauliString.from_label(label)) for g, label in zip(c.g, c.term_labels)])


def build_single_pauli_controls(n_qubits: int, factors: str = "ZX") -> List[PauliSum]:
    """One control per qubit: the sum of the given single-qubit factors on that qubit."""
    return [
        PauliSum(n_qubits, [(1.0, PauliString.single(n_qubits, q, f)) for f in factors])
        for q in range(n_qubits)
    ]


def build_paper_controls(n_qubits: int = 3) -> List[PauliSum]:
    """[Z_j + X_j for each qubit j]."""
    return build_single_pauli_controls(n_qubits, "ZX")


def _random_string(rng: np.random.Generator, n_qubits: int) -> PauliString:
    dim = 1 << n_qubits
    while True:
        x, z = int(rng.integers(dim)), int(rng.integers(dim))
        if x or z:
            return PauliString(n_qubits, x, z)


def random_problem(n_qubits: int, n_terms: int, seed: int) -> Tuple[PauliSum, List[PauliSum]]:
    """
    Seeded random (drift, [control]) pair.

    The drift has n_terms distinct non-identity strings with normal
    coefficients and a spectrum whose consecutive gaps all exceed
    RANDOM_GAP_THRESHOLD. The control is a sum of random single-qubit
    factors that does not commute with the drift.
    """
    check_cap(n_qubits)
    if n_terms < 1 or n_terms > 4 ** n_qubits - 1:
        raise DimensionError(f"n_terms must be in [1, {4 ** n_qubits - 1}], got {n_terms}")

    rng = np.random.default_rng(seed)
    for attempt in range(MAX_RANDOM_RETRIES):
        strings: Dict[PauliString, None] = {}
        while len(strings) < n_terms:
            strings[_random_string(rng, n_qubits)] = None
        coeffs = rng.normal(size=n_terms)
        drift = PauliSum(n_qubits, zip(coeffs, strings))

        factors = rng.integers(0, 3, size=n_qubits)
        control = PauliSum(
            n_qubits,
            [(1.0, PauliString.single(n_qubits, q, "XYZ"[f])) for q, f in enumerate(factors)],
        )

        if len(drift) != n_terms or commutator_i(control, drift).is_empty:
            continue
        if np.min(np.diff(diagonalize(drift).eigenvalues), initial=np.inf) < RANDOM_GAP_THRESHOLD:
            continue
        logger.debug("random_problem(seed=%d) accepted after %d attempts", seed, attempt + 1)
        return drift, [control]

    raise ConvergenceError(
        f"no non-degenerate, non-commuting problem found for n_qubits={n_qubits}, "
        f"n_terms={n_terms} after {MAX_RANDOM_RETRIES} attempts"
    )


# Built-in named models.
MODEL_PRESETS: Dict[str, Callable[[], PauliSum]] = {
    "lih-sto6g-R2.5": build_lih_hamiltonian,
}


def model_preset(name: str) -> PauliSum:
    try:
        return MODEL_PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown model preset {name!r}; available: {sorted(MODEL_PRESETS)}") from None


def list_model_presets() -> Sequence[str]:
    return sorted(MODEL_PRESETS)
