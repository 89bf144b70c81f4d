"""
wfqae - Error types

Every failure the library raises derives from WfqaeError so the CLI can map
families of errors onto exit codes:

- DimensionError / ParseError / ConfigError  -> exit 2 (bad input)
- InvariantError                              -> exit 3 (runtime invariant breach)
"""

from typing import Optional


class WfqaeError(Exception):
    """Base class for all wfqae errors."""


class DimensionError(WfqaeError, ValueError):
    """Qubit counts or vector lengths do not match."""


class QubitCapError(DimensionError):
    """A dense realization would exceed the configured qubit cap."""

    def __init__(self, n_qubits: int, cap: int):
        super().__init__(f"{n_qubits} qubits exceeds the dense cap of {cap}")
        self.n_qubits = n_qubits
        self.cap = cap


class ParseError(WfqaeError, ValueError):
    """Malformed Pauli text, state label, or circuit file."""


class ConfigError(WfqaeError, ValueError):
    """
    Experiment or feedback configuration violates its schema.

    `key` names the offending setting and `line` is its 1-based line in the
    source file when known.
    """

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix = f"line {line}: "
        if key is not None:
            prefix += f"{key}: "
        super().__init__(prefix + message)


class InvariantError(WfqaeError, RuntimeError):
    """A runtime invariant (norm, orthogonality, Lyapunov descent) was breached."""


class ConvergenceError(WfqaeError, RuntimeError):
    """A bounded retry loop gave up."""
