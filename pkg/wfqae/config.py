"""
wfqae - Configuration Management
Experiment configs as flat YAML files, plus the bundled presets.

A config names a model, the controls, the feedback mode and its numbers,
and one initial-state label per register. `load_experiment` accepts a preset
name, a file path, or YAML text; `build_experiment` turns a config into the
Hamiltonians, ensemble and FeedbackConfig the drivers consume.
"""

import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from .algorithms import Ensemble
from .errors import ConfigError, ConvergenceError, DimensionError, InvariantError, ParseError
from .feedback import FeedbackConfig, FeedbackMode
from .models import build_single_pauli_controls, list_model_presets, model_preset, random_problem
from .pauli import PauliSum
from .statevector import StateVector, parse_state_spec

logger = logging.getLogger(__name__)


# ============================================================
# PATHS
# ============================================================

def get_runs_dir() -> Path:
    """Default parent of per-experiment output directories."""
    return Path.cwd() / "runs"


# ============================================================
# BUNDLED PRESETS
# ============================================================

EXPERIMENT_PRESETS: Dict[str, str] = {
    "lih-wfqae": """\
# LiH (R = 2.5) four lowest eigenstates with the weighted feedback law.
name: lih-wfqae
description: LiH four lowest eigenstates from +/- product states
model: lih-sto6g-R2.5
controls: z+x
mode: weighted_full
depth: 20
dt: 0.05
gains: [1.0, 1.0, 1.0]
weights: [8.0, 6.0, 4.0, 2.0]
alpha_init: [0.0, 0.0, 0.0]
initial_states: ["-++", "--+", "+-+", "++-"]
""",
    "lih-wfqae-basis": """\
# Same run started from computational basis states.
name: lih-wfqae-basis
description: LiH four lowest eigenstates from basis states
model: lih-sto6g-R2.5
controls: z+x
mode: weighted_full
depth: 20
dt: 0.05
gains: [1.0, 1.0, 1.0]
weights: [8.0, 6.0, 4.0, 2.0]
alpha_init: [0.0, 0.0, 0.0]
initial_states: ["100", "110", "010", "001"]
""",
    "lih-pth": """\
# Only the third excited state is targeted: weights [1, 1, 1, w].
name: lih-pth
description: LiH third excited state with p-th-only weighting
model: lih-sto6g-R2.5
controls: z+x
mode: weighted_pth_only
depth: 60
dt: 0.05
gains: [1.0, 1.0, 1.0]
weights: [1.0, 1.0, 1.0, 0.5]
alpha_init: [0.0, 0.0, 0.0]
initial_states: ["-++", "--+", "+-+", "++-"]
""",
    "lih-falqon": """\
# Single-register ground-state preparation.
name: lih-falqon
description: LiH ground state with FALQON
model: lih-sto6g-R2.5
controls: z+x
mode: falqon
depth: 60
dt: 0.05
gains: [1.0, 1.0, 1.0]
weights: [1.0]
alpha_init: [0.0, 0.0, 0.0]
initial_states: ["-++"]
""",
}

# Shorthand control specs: Pauli factors summed on each qubit.
CONTROL_SHORTHANDS = {"z+x": "ZX", "x": "X", "y": "Y", "z": "Z"}

RANDOM_MODEL_PREFIX = "random:"


# ============================================================
# CONFIG DATACLASS
# ============================================================

@dataclass
class ExperimentConfig:
    """One experiment, as written in a config file."""

    name: str = "experiment"
    description: str = ""

    # === PROBLEM ===
    model: str = "lih-sto6g-R2.5"
    controls: Optional[Union[str, List[str]]] = None
    seed: int = 0

    # === FEEDBACK ===
    mode: str = FeedbackMode.WEIGHTED_FULL.value
    depth: int = 20
    dt: float = 0.05
    gains: Optional[List[float]] = None
    weights: List[float] = field(default_factory=lambda: [1.0])
    alpha_init: Optional[List[float]] = None
    initial_states: List[str] = field(default_factory=list)

    # === OUTPUT ===
    output_dir: Optional[str] = None
    strict: bool = False

    # 1-based source lines per key, filled by the loader.
    source_lines: Dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def validate(self) -> "ExperimentConfig":
        """Checks that need no model; build_experiment does the rest."""
        if not isinstance(self.depth, int) or isinstance(self.depth, bool) or self.depth < 1:
            raise ConfigError(f"depth must be an integer >= 1, got {self.depth!r}", key="depth")
        if not isinstance(self.dt, (int, float)) or not self.dt > 0:
            raise ConfigError(f"dt must be a number > 0, got {self.dt!r}", key="dt")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be an integer >= 0, got {self.seed!r}", key="seed")
        if self.mode not in {m.value for m in FeedbackMode}:
            choices = ", ".join(m.value for m in FeedbackMode)
            raise ConfigError(f"unknown mode {self.mode!r} (expected one of: {choices})", key="mode")
        if not self.initial_states:
            raise ConfigError("at least one initial state is required", key="initial_states")
        for label in self.initial_states:
            if not isinstance(label, str):
                raise ConfigError(
                    f"state label {label!r} must be a quoted string (e.g. \"100\")", key="initial_states"
                )
        if len(self.weights) != len(self.initial_states):
            raise ConfigError(
                f"{len(self.weights)} weights for {len(self.initial_states)} initial states", key="weights"
            )
        return self

    @property
    def output_path(self) -> Path:
        if self.output_dir:
            return Path(self.output_dir)
        return get_runs_dir() / self.name

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {}
        for f in fields(self):
            if f.name == "source_lines":
                continue
            value = getattr(self, f.name)
            if value is None:
                continue
            data[f.name] = list(value) if isinstance(value, (list, tuple)) else value
        return data

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)


# ============================================================
# CONFIG LOADING
# ============================================================

_FIELD_TYPES = {
    "name": str, "description": str, "model": str, "seed": int, "mode": str,
    "depth": int, "dt": (int, float), "output_dir": str, "strict": bool,
}
_LIST_FIELDS = {"gains", "weights", "alpha_init"}


def _key_lines(text: str) -> Dict[str, int]:
    """Top-level key -> 1-based line, from the YAML node tree."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {key.value: key.start_mark.line + 1 for key, _ in node.value}


def _with_line(error: ConfigError, lines: Dict[str, int]) -> ConfigError:
    if error.line is None and error.key in lines:
        return ConfigError(error.message, key=error.key, line=lines[error.key])
    return error


def _check_types(data: Dict[str, Any]) -> None:
    for key, value in data.items():
        if key in _FIELD_TYPES:
            expected = _FIELD_TYPES[key]
            if isinstance(value, bool) and expected in (int, (int, float)):
                raise ConfigError(f"expected a number, got {value!r}", key=key)
            if not isinstance(value, expected):
                raise ConfigError(f"unexpected value {value!r}", key=key)
        elif key in _LIST_FIELDS:
            if not isinstance(value, list) or any(
                isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
            ):
                raise ConfigError(f"expected a list of numbers, got {value!r}", key=key)
        elif key == "initial_states" and not isinstance(value, list):
            raise ConfigError(f"expected a list of state labels, got {value!r}", key=key)
        elif key == "controls" and not isinstance(value, (str, list)):
            raise ConfigError(f"expected a shorthand or a list of Pauli sums, got {value!r}", key=key)


def parse_experiment(text: str) -> ExperimentConfig:
    """Parse YAML text into a validated ExperimentConfig."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {e}", line=mark.line + 1 if mark else None) from e
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of settings")

    lines = _key_lines(text)
    known = {f.name for f in fields(ExperimentConfig)} - {"source_lines"}
    try:
        for key in data:
            if key not in known:
                raise ConfigError("unknown setting", key=str(key))
        _check_types(data)
        defaults = ExperimentConfig()
        config = ExperimentConfig(
            name=data.get("name", defaults.name),
            description=data.get("description", defaults.description),
            model=data.get("model", defaults.model),
            controls=data.get("controls"),
            seed=data.get("seed", defaults.seed),
            mode=data.get("mode", defaults.mode),
            depth=data.get("depth", defaults.depth),
            dt=float(data.get("dt", defaults.dt)),
            gains=[float(g) for g in data["gains"]] if "gains" in data else None,
            weights=[float(w) for w in data.get("weights", defaults.weights)],
            alpha_init=[float(a) for a in data["alpha_init"]] if "alpha_init" in data else None,
            initial_states=list(data.get("initial_states", [])),
            output_dir=data.get("output_dir"),
            strict=data.get("strict", defaults.strict),
            source_lines=lines,
        )
        return config.validate()
    except ConfigError as e:
        raise _with_line(e, lines) from None


def load_experiment(source: Union[str, Path]) -> ExperimentConfig:
    """Load a preset by name, a config file by path, or raw YAML text."""
    source_str = str(source)
    if source_str in EXPERIMENT_PRESETS:
        return parse_experiment(EXPERIMENT_PRESETS[source_str])
    path = Path(source_str)
    if "\n" not in source_str and path.is_file():
        logger.info("loading experiment config %s", path)
        return parse_experiment(path.read_text())
    if ":" in source_str:
        return parse_experiment(source_str)
    raise ConfigError(
        f"{source_str!r} is neither a preset ({', '.join(sorted(EXPERIMENT_PRESETS))}) nor a config file"
    )


def save_experiment(config: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.to_yaml())
    return path


def list_experiment_presets() -> List[str]:
    return sorted(EXPERIMENT_PRESETS)


def get_example_config() -> str:
    """The bundled LiH experiment, for users to copy and edit."""
    return EXPERIMENT_PRESETS["lih-wfqae"]


# ============================================================
# RESOLUTION
# ============================================================

@dataclass
class Experiment:
    """A config resolved into the objects the drivers take."""
    config: ExperimentConfig
    drift: PauliSum
    controls: List[PauliSum]
    initial_states: List[StateVector]
    feedback: FeedbackConfig

    @property
    def depth(self) -> int:
        return self.config.depth

    @property
    def mode(self) -> FeedbackMode:
        return self.feedback.mode


def resolve_model(spec: str, seed: int = 0):
    """
    Resolve a model spec into (drift, generated controls or None).

    Accepts a model preset name, 'random:<n_qubits>:<n_terms>', a path to a
    Pauli-sum text file, or inline Pauli-sum text.
    """
    spec = spec.strip()
    if spec in list_model_presets():
        return model_preset(spec), None
    if spec.startswith(RANDOM_MODEL_PREFIX):
        try:
            n_qubits, n_terms = (int(v) for v in spec[len(RANDOM_MODEL_PREFIX):].split(":"))
        except ValueError:
            raise ConfigError(f"expected 'random:<n_qubits>:<n_terms>', got {spec!r}", key="model") from None
        if seed < 0:
            raise ConfigError(f"seed must be >= 0, got {seed}", key="seed")
        return random_problem(n_qubits, n_terms, seed)
    path = Path(spec)
    if "\n" not in spec and ";" not in spec and path.is_file():
        return PauliSum.from_text(path.read_text()), None
    if any(c.isspace() for c in spec):
        return PauliSum.from_text(spec), None
    raise ConfigError(
        f"{spec!r} is not a model preset ({', '.join(list_model_presets())}), file, or Pauli text",
        key="model",
    )


def resolve_controls(spec, n_qubits: int) -> List[PauliSum]:
    if spec is None:
        spec = "z+x"
    if isinstance(spec, str):
        key = spec.strip().lower()
        if key not in CONTROL_SHORTHANDS:
            raise ConfigError(
                f"unknown control shorthand {spec!r} (expected {', '.join(CONTROL_SHORTHANDS)} or a list)",
                key="controls",
            )
        return build_single_pauli_controls(n_qubits, CONTROL_SHORTHANDS[key])
    controls = [PauliSum.from_text(text) for text in spec]
    if not controls:
        raise ConfigError("at least one control is required", key="controls")
    for control in controls:
        if control.n_qubits != n_qubits:
            raise ConfigError(f"control has {control.n_qubits} qubits, model has {n_qubits}", key="controls")
    return controls


def build_experiment(config: ExperimentConfig) -> Experiment:
    """Resolve and cross-validate everything before any layer runs."""
    lines = config.source_lines
    try:
        config.validate()
        try:
            drift, generated = resolve_model(config.model, config.seed)
        except (ParseError, DimensionError, ConvergenceError) as e:
            raise ConfigError(str(e), key="model") from e

        if generated is not None and config.controls is None:
            controls = generated
        else:
            try:
                controls = resolve_controls(config.controls, drift.n_qubits)
            except ParseError as e:
                raise ConfigError(str(e), key="controls") from e

        gains = config.gains if config.gains is not None else [1.0] * len(controls)
        if len(gains) != len(controls):
            raise ConfigError(f"{len(gains)} gains for {len(controls)} controls", key="gains")
        if config.alpha_init is not None and len(config.alpha_init) != len(controls):
            raise ConfigError(
                f"{len(config.alpha_init)} alpha_init entries for {len(controls)} controls", key="alpha_init"
            )

        try:
            states = [parse_state_spec(label, drift.n_qubits) for label in config.initial_states]
        except (ParseError, DimensionError) as e:
            raise ConfigError(str(e), key="initial_states") from e
        if len(states) > 1:
            try:
                Ensemble(states)
            except InvariantError as e:
                raise ConfigError(str(e), key="initial_states") from e

        feedback = FeedbackConfig(
            dt=config.dt,
            gains=gains,
            weights=config.weights,
            mode=config.mode,
            alpha_init=config.alpha_init,
        ).validate()
    except ConfigError as e:
        raise _with_line(e, lines) from None

    return Experiment(config=config, drift=drift, controls=controls, initial_states=states, feedback=feedback)
