"""
wfqae - Feedback Laws
Maps measured commutator expectations to the next layer's control values.

Every register q reports B^(q,j) = <phi^(q)| i[H_c,j, H_d] |phi^(q)> for each
control j. The controller for control j is

    alpha^(j) = -K_j * h( sum_q w_q * B^(q,j) )

with h the identity. FALQON is the one-register, unit-weight case; the
p-th-state-only weighting is the case [1, ..., 1, w] with 0 < w < 1.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from .errors import ConfigError, DimensionError
from .pauli import PauliString, PauliSum, commutator_i
from .statevector import StateVector, expectation

logger = logging.getLogger(__name__)


class FeedbackMode(Enum):
    """Which weighting the controller uses."""
    FALQON = "falqon"
    WEIGHTED_FULL = "weighted_full"
    WEIGHTED_PTH_ONLY = "weighted_pth_only"


class HKind(Enum):
    """Scalar map h(.) applied to the weighted commutator sum; h(0) = 0, x h(x) > 0."""
    IDENTITY = "identity"

    def __call__(self, x: float) -> float:
        return x


def _enum_value(enum_cls, value, key: str):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"unknown value {value!r} (expected one of: {choices})", key=key) from None


@dataclass
class FeedbackConfig:
    """Everything the controller needs besides the measurements."""
    dt: float = 0.05
    gains: List[float] = field(default_factory=lambda: [1.0])
    weights: List[float] = field(default_factory=lambda: [1.0])
    mode: FeedbackMode = FeedbackMode.FALQON
    h_kind: HKind = HKind.IDENTITY
    alpha_init: Optional[List[float]] = None

    def __post_init__(self):
        self.mode = _enum_value(FeedbackMode, self.mode, "mode")
        self.h_kind = _enum_value(HKind, self.h_kind, "h_kind")
        self.gains = [float(g) for g in self.gains]
        self.weights = [float(w) for w in self.weights]
        if self.alpha_init is None:
            self.alpha_init = [0.0] * len(self.gains)
        else:
            self.alpha_init = [float(a) for a in self.alpha_init]

    @property
    def n_controls(self) -> int:
        return len(self.gains)

    @property
    def n_registers(self) -> int:
        return len(self.weights)

    @property
    def p(self) -> int:
        return len(self.weights) - 1

    def validate(self) -> "FeedbackConfig":
        """Raise ConfigError on the first violated constraint; return self."""
        if not self.dt > 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}", key="dt")
        if not self.gains:
            raise ConfigError("at least one gain is required", key="gains")
        if any(not g > 0 for g in self.gains):
            raise ConfigError(f"gains must all be > 0, got {self.gains}", key="gains")
        if len(self.alpha_init) != len(self.gains):
            raise ConfigError(
                f"alpha_init has {len(self.alpha_init)} entries for {len(self.gains)} controls",
                key="alpha_init",
            )
        if not self.weights:
            raise ConfigError("at least one weight is required", key="weights")

        w = self.weights
        if self.mode is FeedbackMode.FALQON:
            if w != [1.0]:
                raise ConfigError(f"falqon mode needs weights [1] (one register), got {w}", key="weights")
        elif self.mode is FeedbackMode.WEIGHTED_FULL:
            if any(not w[q] > w[q + 1] for q in range(len(w) - 1)):
                raise ConfigError(
                    f"weighted_full needs strictly decreasing weights (w_q > w_j for q < j), got {w}",
                    key="weights",
                )
            if any(not x > 0 for x in w):
                raise ConfigError(f"weights must be > 0, got {w}", key="weights")
        elif self.mode is FeedbackMode.WEIGHTED_PTH_ONLY:
            if len(w) < 2:
                raise ConfigError("weighted_pth_only needs at least two registers", key="weights")
            if any(x != 1.0 for x in w[:-1]) or not 0.0 < w[-1] < 1.0:
                raise ConfigError(
                    f"weighted_pth_only needs weights [1, ..., 1, w] with 0 < w < 1, got {w}",
                    key="weights",
                )
        return self


# ============================================================
# CONTROLLERS
# ============================================================

def falqon_controller(b: float) -> float:
    """alpha_{k+1} = -B_k."""
    return -b


def weighted_controller(bs: Sequence[float], cfg: FeedbackConfig, control_index: int = 0) -> float:
    """-K_j * h(sum_q w_q B^(q)) for control `control_index`."""
    if len(bs) != len(cfg.weights):
        raise DimensionError(f"{len(bs)} commutator values for {len(cfg.weights)} weights")
    if not 0 <= control_index < len(cfg.gains):
        raise DimensionError(f"control index {control_index} out of range for {len(cfg.gains)} gains")
    weighted = float(np.dot(cfg.weights, bs))
    return -cfg.gains[control_index] * cfg.h_kind(weighted)


def weighted_controls(b_matrix: np.ndarray, cfg: FeedbackConfig) -> List[float]:
    """
    Next-layer controls for all j from a (registers x controls) matrix of B values.

    FALQON mode uses -K_j * B_j on its single register.
    """
    b_matrix = np.asarray(b_matrix, dtype=float)
    if b_matrix.shape != (cfg.n_registers, cfg.n_controls):
        raise DimensionError(
            f"expected B values of shape {(cfg.n_registers, cfg.n_controls)}, got {b_matrix.shape}"
        )
    return [weighted_controller(b_matrix[:, j], cfg, j) for j in range(cfg.n_controls)]


def lyapunov_value(energies: Sequence[float], weights: Sequence[float]) -> float:
    """V = sum_q w_q E^(q)."""
    if len(energies) != len(weights):
        raise DimensionError(f"{len(energies)} energies for {len(weights)} weights")
    return float(np.dot(weights, energies))


def predict_layer_cost(p: int, n_pauli_terms: int) -> int:
    """Distinct expectation estimations per layer: (p + 1) * N."""
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    return (p + 1) * n_pauli_terms


# ============================================================
# COMMUTATOR OBSERVABLES
# ============================================================

@dataclass(frozen=True)
class CommutatorObservables:
    """i[H_c,j, H_d] for every control j, expanded once in the Pauli basis."""
    observables: tuple

    @classmethod
    def from_hamiltonians(cls, drift: PauliSum, controls: Sequence[PauliSum]) -> "CommutatorObservables":
        observables = tuple(commutator_i(control, drift) for control in controls)
        for j, obs in enumerate(observables):
            if obs.is_empty:
                logger.warning("control %d commutes with the drift; its controller is always 0", j)
        return cls(observables)

    def __len__(self) -> int:
        return len(self.observables)

    def __getitem__(self, j: int) -> PauliSum:
        return self.observables[j]

    def distinct_strings(self) -> List[PauliString]:
        seen = {}
        for obs in self.observables:
            for string in obs.strings:
                seen.setdefault(string, None)
        return list(seen)

    @property
    def n_terms(self) -> int:
        """Distinct Pauli strings across all controls (estimations per register)."""
        return len(self.distinct_strings())

    def measure(self, state: StateVector) -> List[float]:
        """B^(j) = <state| i[H_c,j, H_d] |state> for each j."""
        return [expectation(state, obs) for obs in self.observables]


class FeedbackLaw:
    """
    Stateless controller bound to a FeedbackConfig and its commutator observables.

    Holds the per-register measurement step and the weighted reduction so the
    drivers only ever ask for "the next alphas".
    """

    def __init__(self, cfg: FeedbackConfig, observables: CommutatorObservables):
        cfg.validate()
        if len(observables) != cfg.n_controls:
            raise ConfigError(
                f"{cfg.n_controls} gains configured for {len(observables)} controls", key="gains"
            )
        self.cfg = cfg
        self.observables = observables

    def measure(self, registers: Sequence[StateVector]) -> np.ndarray:
        """(registers x controls) matrix of B values."""
        return np.array([self.observables.measure(state) for state in registers], dtype=float)

    def next_alphas(self, b_matrix: np.ndarray) -> List[float]:
        return weighted_controls(b_matrix, self.cfg)

    def layer_cost(self) -> int:
        return predict_layer_cost(self.cfg.p, self.observables.n_terms)
