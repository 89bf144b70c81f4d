"""
wfqae - Algorithms
Layer-by-layer drivers for FALQON and WFQAE.

Both algorithms run the same loop: every register receives the drift
exponential followed by the control exponential with the current alphas,
then the commutator expectations of all registers feed one controller that
produces the next alphas. FALQON is the one-register case.

Executing `depth` layers applies alpha_1 .. alpha_depth; alpha_{depth+1} is
computed and recorded but not applied.
"""

import logging
import numbers
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, DimensionError, InvariantError
from .feedback import (
    CommutatorObservables,
    FeedbackConfig,
    FeedbackLaw,
    FeedbackMode,
    lyapunov_value,
)
from .pauli import PauliSum
from .spectrum import Spectrum, diagonalize, fidelity
from .statevector import ControlStack, LayerKind, LayerUnitary, StateVector, expectation, overlap

logger = logging.getLogger(__name__)


ORTHOGONALITY_TOLERANCE = 1e-8
LYAPUNOV_TOLERANCE = 1e-9


# ============================================================
# DATA TYPES
# ============================================================

class Ensemble:
    """p+1 mutually orthogonal registers evolved under one shared circuit."""

    def __init__(self, registers: Sequence[StateVector], tolerance: float = ORTHOGONALITY_TOLERANCE):
        registers = tuple(registers)
        if not registers:
            raise DimensionError("an ensemble needs at least one register")
        n_qubits = registers[0].n_qubits
        for state in registers:
            if state.n_qubits != n_qubits:
                raise DimensionError(f"register sizes differ: {state.n_qubits} vs {n_qubits}")
        self.registers: Tuple[StateVector, ...] = registers
        worst = self.max_overlap()
        if worst >= tolerance:
            raise InvariantError(f"initial registers are not orthogonal: max |<a|b>| = {worst:.3g}")

    def __len__(self) -> int:
        return len(self.registers)

    def __iter__(self):
        return iter(self.registers)

    def __getitem__(self, q: int) -> StateVector:
        return self.registers[q]

    @property
    def n_qubits(self) -> int:
        return self.registers[0].n_qubits

    def max_overlap(self) -> float:
        return max_pairwise_overlap(self.registers)


def max_pairwise_overlap(states: Sequence[StateVector]) -> float:
    worst = 0.0
    for a in range(len(states)):
        for b in range(a + 1, len(states)):
            worst = max(worst, abs(overlap(states[a], states[b])))
    return worst


@dataclass
class CircuitDescription:
    """The algorithm's output: alphas per layer plus the Hamiltonians they drive."""
    drift: PauliSum
    controls: List[PauliSum]
    dt: float
    layers: List[List[float]] = field(default_factory=list)

    @property
    def n_qubits(self) -> int:
        return self.drift.n_qubits

    @property
    def depth(self) -> int:
        return len(self.layers)


@dataclass
class LayerRecord:
    """
    Measurements after layer k (k = 0 is the initial ensemble).

    `alphas` were applied in layer k; `next_alphas` come out of this
    layer's measurements. Per-register lists are indexed by q.
    """
    k: int
    alphas: List[float]
    next_alphas: List[float]
    energies: List[float]
    fidelities: List[float]
    commutators: List[List[float]]
    lyapunov: float
    max_overlap: float
    estimations: int
    cumulative_estimations: int


@dataclass
class RunTrace:
    """Per-layer records of one run plus the run-level facts needed to report on it."""
    mode: FeedbackMode
    weights: List[float]
    eigenvalues: List[float]
    initial: LayerRecord
    layers: List[LayerRecord] = field(default_factory=list)
    n_terms: int = 0
    lyapunov_breaches: int = 0
    final_states: Tuple[StateVector, ...] = ()

    def __len__(self) -> int:
        return len(self.layers)

    @property
    def records(self) -> List[LayerRecord]:
        """Initial record followed by every layer."""
        return [self.initial] + self.layers

    @property
    def final(self) -> LayerRecord:
        return self.layers[-1] if self.layers else self.initial

    def lyapunov_values(self) -> np.ndarray:
        return np.array([r.lyapunov for r in self.records])

    def energies(self) -> np.ndarray:
        """(depth + 1) x registers."""
        return np.array([r.energies for r in self.records])

    def fidelities(self) -> np.ndarray:
        return np.array([r.fidelities for r in self.records])

    def alphas(self) -> np.ndarray:
        """depth x controls: the alphas applied in each layer."""
        return np.array([r.alphas for r in self.layers])

    def max_overlap(self) -> float:
        return max(r.max_overlap for r in self.records)


LayerCallback = Callable[[LayerRecord], None]


# ============================================================
# DRIVERS
# ============================================================

def _check_depth(depth: int) -> None:
    if isinstance(depth, bool) or not isinstance(depth, numbers.Integral) or depth < 1:
        raise ConfigError(f"depth must be an integer >= 1, got {depth!r}", key="depth")


def _measure(
    k: int,
    states: Sequence[StateVector],
    alphas: List[float],
    drift: PauliSum,
    law: FeedbackLaw,
    spectrum: Spectrum,
    layer_cost: int,
) -> LayerRecord:
    energies = [expectation(state, drift) for state in states]
    b_matrix = law.measure(states)
    return LayerRecord(
        k=k,
        alphas=list(alphas),
        next_alphas=law.next_alphas(b_matrix),
        energies=energies,
        fidelities=[fidelity(state, spectrum, q) for q, state in enumerate(states)],
        commutators=b_matrix.tolist(),
        lyapunov=lyapunov_value(energies, law.cfg.weights),
        max_overlap=max_pairwise_overlap(states),
        estimations=layer_cost if k else 0,
        cumulative_estimations=layer_cost * k,
    )


def _drive(
    drift: PauliSum,
    controls: Sequence[PauliSum],
    registers: Sequence[StateVector],
    cfg: FeedbackConfig,
    depth: int,
    spectrum: Optional[Spectrum] = None,
    strict: bool = False,
    on_layer: Optional[LayerCallback] = None,
) -> Tuple[CircuitDescription, RunTrace]:
    _check_depth(depth)
    cfg.validate()
    if len(registers) != cfg.n_registers:
        raise ConfigError(
            f"{len(registers)} initial states for {cfg.n_registers} weights", key="weights"
        )
    for state in registers:
        if state.n_qubits != drift.n_qubits:
            raise DimensionError(f"initial state has {state.n_qubits} qubits, drift {drift.n_qubits}")

    observables = CommutatorObservables.from_hamiltonians(drift, controls)
    law = FeedbackLaw(cfg, observables)
    drift_layer = LayerUnitary(LayerKind.DRIFT, drift, cfg.dt)
    stack = ControlStack(controls, cfg.dt)
    spectrum = spectrum or diagonalize(drift)
    layer_cost = law.layer_cost()

    states = list(registers)
    initial = _measure(0, states, [], drift, law, spectrum, layer_cost)
    trace = RunTrace(
        mode=cfg.mode,
        weights=list(cfg.weights),
        eigenvalues=spectrum.lowest(len(states)),
        initial=initial,
        n_terms=observables.n_terms,
    )
    circuit = CircuitDescription(drift=drift, controls=list(controls), dt=cfg.dt)

    logger.info(
        "running %s: %d registers, %d controls, depth %d, %d estimations/layer",
        cfg.mode.value, len(states), len(controls), depth, layer_cost,
    )

    alphas = list(cfg.alpha_init)
    previous_v = initial.lyapunov
    for k in range(1, depth + 1):
        unitary, strength = stack.for_layer(alphas)
        states = [unitary.apply(drift_layer.apply(state), strength) for state in states]

        record = _measure(k, states, alphas, drift, law, spectrum, layer_cost)
        if record.max_overlap >= ORTHOGONALITY_TOLERANCE:
            raise InvariantError(
                f"layer {k}: registers lost orthogonality, max |<a|b>| = {record.max_overlap:.3g}"
            )
        if record.lyapunov > previous_v + LYAPUNOV_TOLERANCE:
            message = f"layer {k}: Lyapunov value rose from {previous_v:.12g} to {record.lyapunov:.12g}"
            if strict:
                raise InvariantError(message)
            logger.warning(message)
            trace.lyapunov_breaches += 1

        circuit.layers.append(list(alphas))
        trace.layers.append(record)
        if on_layer:
            on_layer(record)
        logger.debug("layer %d: V=%.12g alphas=%s", k, record.lyapunov, record.next_alphas)

        previous_v = record.lyapunov
        alphas = record.next_alphas

    trace.final_states = tuple(states)
    return circuit, trace


def run_falqon(
    drift: PauliSum,
    controls: Sequence[PauliSum],
    initial: StateVector,
    cfg: FeedbackConfig,
    depth: int,
    **options,
) -> Tuple[CircuitDescription, RunTrace]:
    """Ground-state preparation on one register. Options: spectrum, strict, on_layer."""
    if cfg.mode is not FeedbackMode.FALQON:
        raise ConfigError(f"run_falqon needs mode 'falqon', got {cfg.mode.value!r}", key="mode")
    return _drive(drift, controls, [initial], cfg, depth, **options)


def run_wfqae(
    drift: PauliSum,
    controls: Sequence[PauliSum],
    initials: Ensemble,
    cfg: FeedbackConfig,
    depth: int,
    **options,
) -> Tuple[CircuitDescription, RunTrace]:
    """Prepare the p+1 lowest eigenstates (or only the p-th) with one shared circuit."""
    if cfg.mode is FeedbackMode.FALQON:
        raise ConfigError("run_wfqae needs a weighted mode, got 'falqon'", key="mode")
    if not isinstance(initials, Ensemble):
        initials = Ensemble(initials)
    return _drive(drift, controls, initials.registers, cfg, depth, **options)


def replay(circuit: CircuitDescription, initial: StateVector) -> StateVector:
    """Apply the recorded layers to `initial` without feedback."""
    if initial.n_qubits != circuit.n_qubits:
        raise DimensionError(f"initial state has {initial.n_qubits} qubits, circuit {circuit.n_qubits}")
    if not circuit.layers:
        return initial
    drift_layer = LayerUnitary(LayerKind.DRIFT, circuit.drift, circuit.dt)
    stack = ControlStack(circuit.controls, circuit.dt)
    state = initial
    for alphas in circuit.layers:
        unitary, strength = stack.for_layer(alphas)
        state = unitary.apply(drift_layer.apply(state), strength)
    return state
