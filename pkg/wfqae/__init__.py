"""
wfqae v1.0
Feedback-based ground and excited state preparation on an exact statevector simulator.

- FALQON: one register driven to the ground state by a Lyapunov feedback law
- WFQAE: p+1 orthogonal registers share one circuit and converge to the
  p+1 lowest eigenstates under a weighted feedback law
- LiH (STO-6G, R = 2.5) three-qubit model and bundled experiment presets
"""

__version__ = "1.0.0"
__license__ = "MIT"

from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    InvariantError,
    ParseError,
    QubitCapError,
    WfqaeError,
)
from .pauli import PauliString, PauliSum, commutator_i, multiply, scale_and_add, to_dense
from .statevector import (
    ControlStack,
    LayerKind,
    LayerUnitary,
    Propagator,
    StateVector,
    apply_generator,
    expectation,
    overlap,
    prepare_basis_state,
    prepare_pm_state,
)
from .feedback import (
    CommutatorObservables,
    FeedbackConfig,
    FeedbackLaw,
    FeedbackMode,
    HKind,
    falqon_controller,
    lyapunov_value,
    predict_layer_cost,
    weighted_controller,
)
from .algorithms import (
    CircuitDescription,
    Ensemble,
    LayerRecord,
    RunTrace,
    replay,
    run_falqon,
    run_wfqae,
)
from .models import LiHCoefficients, build_lih_hamiltonian, build_paper_controls, random_problem
from .spectrum import Spectrum, diagonalize, fidelity
from .config import ExperimentConfig, build_experiment, load_experiment, save_experiment

__all__ = [
    # Errors
    "WfqaeError",
    "DimensionError",
    "QubitCapError",
    "ParseError",
    "ConfigError",
    "InvariantError",
    "ConvergenceError",

    # Pauli algebra
    "PauliString",
    "PauliSum",
    "multiply",
    "commutator_i",
    "scale_and_add",
    "to_dense",

    # Statevector engine
    "StateVector",
    "LayerKind",
    "LayerUnitary",
    "Propagator",
    "ControlStack",
    "prepare_basis_state",
    "prepare_pm_state",
    "apply_generator",
    "expectation",
    "overlap",

    # Feedback laws
    "FeedbackConfig",
    "FeedbackMode",
    "HKind",
    "FeedbackLaw",
    "CommutatorObservables",
    "falqon_controller",
    "weighted_controller",
    "lyapunov_value",
    "predict_layer_cost",

    # Algorithms
    "Ensemble",
    "CircuitDescription",
    "LayerRecord",
    "RunTrace",
    "run_falqon",
    "run_wfqae",
    "replay",

    # Models
    "LiHCoefficients",
    "build_lih_hamiltonian",
    "build_paper_controls",
    "random_problem",

    # Spectral oracle
    "Spectrum",
    "diagonalize",
    "fidelity",

    # Config
    "ExperimentConfig",
    "load_experiment",
    "save_experiment",
    "build_experiment",
]
