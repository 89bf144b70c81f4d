"""
wfqae - Run Export
Writes run artifacts: the per-layer trace CSV, the JSON report, the replayable
circuit file and optional state dumps.

Trace CSV columns, in order (j indexes controls, q indexes registers):

    k                       layer index, 0 is the initial ensemble
    alpha_j                 control value applied in layer k (empty at k = 0)
    next_alpha_j            control value computed from layer k's measurements
    lyapunov                sum_q w_q E_q
    energy_q                <phi_q|H_d|phi_q>
    fidelity_q              overlap with the q-th lowest eigenspace, squared
    commutator_q_j          <phi_q| i[H_c,j, H_d] |phi_q>
    max_overlap             largest pairwise |<phi_a|phi_b>|
    estimations             expectation estimations spent on layer k
    cumulative_estimations  estimations spent on layers 1..k

All floats are written with 12 significant digits.
"""

import csv
import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml

from .algorithms import CircuitDescription, LayerRecord, RunTrace
from .errors import ParseError
from .pauli import PauliSum
from .spectrum import Spectrum
from .statevector import StateVector

logger = logging.getLogger(__name__)


CIRCUIT_FORMAT = "wfqae-circuit/1"

PathLike = Union[str, Path]


def fmt(value: float) -> str:
    return f"{value:.12g}"


# ============================================================
# TRACE CSV
# ============================================================

def trace_header(n_controls: int, n_registers: int) -> List[str]:
    header = ["k"]
    header += [f"alpha_{j}" for j in range(n_controls)]
    header += [f"next_alpha_{j}" for j in range(n_controls)]
    header.append("lyapunov")
    header += [f"energy_{q}" for q in range(n_registers)]
    header += [f"fidelity_{q}" for q in range(n_registers)]
    header += [f"commutator_{q}_{j}" for q in range(n_registers) for j in range(n_controls)]
    header += ["max_overlap", "estimations", "cumulative_estimations"]
    return header


def trace_row(record: LayerRecord, n_controls: int) -> List[str]:
    alphas = [fmt(a) for a in record.alphas] or [""] * n_controls
    row = [str(record.k)] + alphas + [fmt(a) for a in record.next_alphas]
    row.append(fmt(record.lyapunov))
    row += [fmt(e) for e in record.energies]
    row += [fmt(f) for f in record.fidelities]
    row += [fmt(b) for per_register in record.commutators for b in per_register]
    row += [fmt(record.max_overlap), str(record.estimations), str(record.cumulative_estimations)]
    return row


def write_trace_csv(trace: RunTrace, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n_controls = len(trace.initial.next_alphas)
    n_registers = len(trace.weights)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(trace_header(n_controls, n_registers))
        for record in trace.records:
            writer.writerow(trace_row(record, n_controls))
    logger.info("wrote trace (%d layers) to %s", len(trace), path)
    return path


# ============================================================
# REPORT
# ============================================================

def build_report(
    trace: RunTrace,
    spectrum: Spectrum,
    name: str = "",
    levels_shown: Optional[int] = None,
) -> Dict[str, Any]:
    """Structured summary of a run: final fidelities, exact levels and estimation costs."""
    n_registers = len(trace.weights)
    levels_shown = levels_shown or n_registers
    initial, final = trace.initial, trace.final
    registers = []
    for q in range(n_registers):
        target = trace.eigenvalues[q]
        registers.append({
            "register": q,
            "target_eigenvalue": target,
            "initial_energy": initial.energies[q],
            "final_energy": final.energies[q],
            "initial_error": abs(initial.energies[q] - target),
            "final_error": abs(final.energies[q] - target),
            "initial_fidelity": initial.fidelities[q],
            "final_fidelity": final.fidelities[q],
        })
    return {
        "name": name,
        "mode": trace.mode.value,
        "weights": list(trace.weights),
        "depth": len(trace),
        "eigenvalues": [float(v) for v in spectrum.eigenvalues],
        "degeneracy_groups": spectrum.degeneracy_groups(),
        "gaps": [float(g) for g in spectrum.gaps()[: max(levels_shown - 1, 0)]],
        "registers": registers,
        "initial_lyapunov": initial.lyapunov,
        "final_lyapunov": final.lyapunov,
        "lyapunov_breaches": trace.lyapunov_breaches,
        "max_overlap": trace.max_overlap(),
        "commutator_terms": trace.n_terms,
        "estimations_per_layer": final.estimations,
        "total_estimations": final.cumulative_estimations,
        "final_alphas": final.next_alphas,
    }


def write_report_json(report: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2))
    return path


def trace_to_dict(trace: RunTrace) -> Dict[str, Any]:
    return {
        "mode": trace.mode.value,
        "weights": list(trace.weights),
        "eigenvalues": list(trace.eigenvalues),
        "records": [asdict(record) for record in trace.records],
    }


# ============================================================
# CIRCUIT FILE
# ============================================================

def circuit_to_dict(circuit: CircuitDescription) -> Dict[str, Any]:
    return {
        "format": CIRCUIT_FORMAT,
        "n_qubits": circuit.n_qubits,
        "dt": circuit.dt,
        "drift": circuit.drift.to_text(),
        "controls": [control.to_text() for control in circuit.controls],
        "layers": [list(alphas) for alphas in circuit.layers],
    }


def save_circuit(circuit: CircuitDescription, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(circuit_to_dict(circuit), sort_keys=False, default_flow_style=None))
    return path


def circuit_from_dict(data: Any) -> CircuitDescription:
    if not isinstance(data, dict) or data.get("format") != CIRCUIT_FORMAT:
        raise ParseError(f"not a {CIRCUIT_FORMAT} circuit file")
    try:
        drift = PauliSum.from_text(data["drift"])
        controls = [PauliSum.from_text(text) for text in data["controls"]]
        dt = float(data["dt"])
        layers = [[float(a) for a in alphas] for alphas in data["layers"]]
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed circuit file: {e!r}") from e
    if drift.n_qubits != data.get("n_qubits", drift.n_qubits):
        raise ParseError(f"drift has {drift.n_qubits} qubits, header says {data['n_qubits']}")
    for alphas in layers:
        if len(alphas) != len(controls):
            raise ParseError(f"layer has {len(alphas)} values for {len(controls)} controls")
    return CircuitDescription(drift=drift, controls=controls, dt=dt, layers=layers)


def load_circuit(path: PathLike) -> CircuitDescription:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ParseError(f"{path}: invalid YAML: {e}") from e
    return circuit_from_dict(data)


# ============================================================
# STATE DUMPS
# ============================================================

def write_state_csv(state: StateVector, path: PathLike) -> Path:
    """Amplitudes as index, basis label, real, imag."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "basis", "real", "imag"])
        for index, amp in enumerate(state.amplitudes):
            writer.writerow([index, format(index, f"0{state.n_qubits}b"), fmt(amp.real), fmt(amp.imag)])
    return path


def dump_states(states: Sequence[StateVector], directory: PathLike) -> List[Path]:
    directory = Path(directory)
    return [write_state_csv(state, directory / f"state_q{q}.csv") for q, state in enumerate(states)]
