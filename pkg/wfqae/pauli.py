"""
wfqae - Pauli Algebra
Symbolic Pauli strings and real-weighted Pauli sums.

Encoding:
    A PauliString over n qubits is stored as two integer masks in
    computational-basis index order: qubit q owns bit (n - 1 - q), so qubit 0
    is the leftmost factor of a label and the most significant bit of a basis
    index. Factor bits are (x, z): I=(0,0) X=(1,0) Y=(1,1) Z=(0,1), and the
    string equals i^{|x & z|} X^x Z^z.

    Products, commutation checks and the action on a basis vector are
    popcounts over these masks, so the commutator expansion stays exact.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError, ParseError, QubitCapError

logger = logging.getLogger(__name__)


DEFAULT_QUBIT_CAP = 12
COEFF_TOLERANCE = 1e-14

# i**k for k = 0..3
PHASES = (1, 1j, -1, -1j)

_LABEL_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LABEL = {bits: label for label, bits in _LABEL_BITS.items()}

Term = Tuple[float, "PauliString"]


def _popcount(value: int) -> int:
    return bin(value).count("1")


def check_cap(n_qubits: int, cap: int = DEFAULT_QUBIT_CAP) -> None:
    """Raise QubitCapError if a dense 2^n object would exceed the cap."""
    if n_qubits > cap:
        raise QubitCapError(n_qubits, cap)


def mask_parity(indices: np.ndarray, mask: int) -> np.ndarray:
    """Parity of popcount(index & mask) for every index in the array."""
    parity = np.zeros(indices.shape, dtype=np.int64)
    bit = 0
    while mask >> bit:
        if (mask >> bit) & 1:
            parity ^= (indices >> bit) & 1
        bit += 1
    return parity


# ============================================================
# PAULI STRING
# ============================================================

@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, packed as x/z masks."""

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise DimensionError(f"n_qubits must be positive, got {self.n_qubits}")
        full = (1 << self.n_qubits) - 1
        if (self.x_mask | self.z_mask) & ~full:
            raise DimensionError(f"masks do not fit in {self.n_qubits} qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a factor string such as 'XXI' (qubit 0 leftmost)."""
        if not label:
            raise ParseError("empty Pauli label")
        n = len(label)
        x_mask = z_mask = 0
        for q, char in enumerate(label):
            if char not in _LABEL_BITS:
                raise ParseError(f"invalid Pauli factor {char!r} in {label!r}")
            x, z = _LABEL_BITS[char]
            bit = 1 << (n - 1 - q)
            if x:
                x_mask |= bit
            if z:
                z_mask |= bit
        return cls(n, x_mask, z_mask)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, factor: str) -> "PauliString":
        """A single non-identity factor on one qubit."""
        if not 0 <= qubit < n_qubits:
            raise DimensionError(f"qubit {qubit} out of range for {n_qubits} qubits")
        label = ["I"] * n_qubits
        label[qubit] = factor
        return cls.from_label("".join(label))

    def _bit(self, qubit: int) -> int:
        return 1 << (self.n_qubits - 1 - qubit)

    def factor(self, qubit: int) -> str:
        bit = self._bit(qubit)
        return _BITS_LABEL[(int(bool(self.x_mask & bit)), int(bool(self.z_mask & bit)))]

    @property
    def label(self) -> str:
        return "".join(self.factor(q) for q in range(self.n_qubits))

    @property
    def support(self) -> Tuple[int, ...]:
        """Qubits carrying a non-identity factor."""
        occupied = self.x_mask | self.z_mask
        return tuple(q for q in range(self.n_qubits) if occupied & self._bit(q))

    @property
    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def commutes_with(self, other: "PauliString") -> bool:
        _check_same_size(self.n_qubits, other.n_qubits)
        overlap = _popcount(self.x_mask & other.z_mask) + _popcount(self.z_mask & other.x_mask)
        return overlap % 2 == 0

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Return P|v> for a length-2^n amplitude vector."""
        dim = 1 << self.n_qubits
        if vector.shape != (dim,):
            raise DimensionError(f"vector of shape {vector.shape} does not match {self.n_qubits} qubits")
        indices = np.arange(dim)
        signs = 1 - 2 * mask_parity(indices, self.z_mask)
        phase = PHASES[_popcount(self.x_mask & self.z_mask) % 4]
        out = np.empty(dim, dtype=complex)
        out[indices ^ self.x_mask] = phase * signs * vector
        return out

    def to_dense(self, cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
        check_cap(self.n_qubits, cap)
        dim = 1 << self.n_qubits
        indices = np.arange(dim)
        signs = 1 - 2 * mask_parity(indices, self.z_mask)
        phase = PHASES[_popcount(self.x_mask & self.z_mask) % 4]
        matrix = np.zeros((dim, dim), dtype=complex)
        matrix[indices ^ self.x_mask, indices] = phase * signs
        return matrix

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


def _check_same_size(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"qubit count mismatch: {a} vs {b}")


def multiply(a: PauliString, b: PauliString) -> Tuple[complex, PauliString]:
    """
    Product of two Pauli strings as (phase, string) with phase in {1, -1, i, -i}.

    Using P = i^{|x&z|} X^x Z^z and Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1,
    the phase exponent is |x1&z1| + |x2&z2| + 2|z1&x2| - |x3&z3| (mod 4).
    """
    _check_same_size(a.n_qubits, b.n_qubits)
    x_mask = a.x_mask ^ b.x_mask
    z_mask = a.z_mask ^ b.z_mask
    exponent = (
        _popcount(a.x_mask & a.z_mask)
        + _popcount(b.x_mask & b.z_mask)
        + 2 * _popcount(a.z_mask & b.x_mask)
        - _popcount(x_mask & z_mask)
    ) % 4
    return PHASES[exponent], PauliString(a.n_qubits, x_mask, z_mask)


# ============================================================
# PAULI SUM
# ============================================================

class PauliSum:
    """
    Real-weighted sum of Pauli strings in canonical form.

    Construction merges repeated strings and drops coefficients below
    COEFF_TOLERANCE. Instances are immutable; term order is first appearance.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Iterable[Term] = ()):
        if n_qubits < 1:
            raise DimensionError(f"n_qubits must be positive, got {n_qubits}")
        merged: Dict[PauliString, float] = {}
        for coeff, string in terms:
            _check_same_size(n_qubits, string.n_qubits)
            if isinstance(coeff, complex):
                if abs(coeff.imag) > COEFF_TOLERANCE:
                    raise ValueError(f"PauliSum coefficients must be real, got {coeff}")
                coeff = coeff.real
            if not math.isfinite(coeff):
                raise ValueError(f"PauliSum coefficients must be finite, got {coeff}")
            merged[string] = merged.get(string, 0.0) + float(coeff)
        self.n_qubits = n_qubits
        self._terms: Tuple[Term, ...] = tuple(
            (coeff, string) for string, coeff in merged.items() if abs(coeff) >= COEFF_TOLERANCE
        )

    # --- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def from_label(cls, label: str, coeff: float = 1.0) -> "PauliSum":
        string = PauliString.from_label(label)
        return cls(string.n_qubits, [(coeff, string)])

    @classmethod
    def from_labels(cls, pairs: Sequence[Tuple[float, str]]) -> "PauliSum":
        """Build from (coefficient, label) pairs; all labels must share a length."""
        if not pairs:
            raise ParseError("at least one term is needed to infer the qubit count")
        strings = [(coeff, PauliString.from_label(label)) for coeff, label in pairs]
        return cls(strings[0][1].n_qubits, strings)

    @classmethod
    def from_text(cls, text: str) -> "PauliSum":
        """
        Parse lines of '<coefficient> <factor-string>'.

        Blank lines and '#' comments are ignored; ';' also separates terms so
        short sums can be written inline.
        """
        pairs: List[Tuple[float, str]] = []
        for lineno, raw in enumerate(text.replace(";", "\n").splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ParseError(f"term {lineno}: expected '<coefficient> <factors>', got {raw.strip()!r}")
            try:
                coeff = float(fields[0])
            except ValueError as e:
                raise ParseError(f"term {lineno}: bad coefficient {fields[0]!r}") from e
            if not math.isfinite(coeff):
                raise ParseError(f"term {lineno}: coefficient {fields[0]!r} is not finite")
            pairs.append((coeff, fields[1]))
        if not pairs:
            raise ParseError("no Pauli terms found")
        lengths = {len(label) for _, label in pairs}
        if len(lengths) != 1:
            raise ParseError(f"inconsistent factor-string lengths {sorted(lengths)}")
        return cls.from_labels(pairs)

    def to_text(self) -> str:
        """Serialize one term per line; repr keeps coefficients bit-exact."""
        return "".join(f"{coeff!r} {string.label}\n" for coeff, string in self._terms)

    # --- container protocol --------------------------------------------

    @property
    def terms(self) -> Tuple[Term, ...]:
        return self._terms

    @property
    def strings(self) -> List[PauliString]:
        return [string for _, string in self._terms]

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(self._terms)

    @property
    def is_empty(self) -> bool:
        return not self._terms

    def coefficient(self, string: Union[PauliString, str]) -> float:
        if isinstance(string, str):
            string = PauliString.from_label(string)
        for coeff, s in self._terms:
            if s == string:
                return coeff
        return 0.0

    def as_dict(self) -> Dict[PauliString, float]:
        return {string: coeff for coeff, string in self._terms}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self.as_dict() == other.as_dict()

    __hash__ = None  # type: ignore[assignment]

    def allclose(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        if self.n_qubits != other.n_qubits:
            return False
        diff = self - other
        return all(abs(coeff) <= atol for coeff, _ in diff)

    # --- arithmetic -----------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        return scale_and_add([(1.0, self), (1.0, other)])

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return scale_and_add([(1.0, self), (-1.0, other)])

    def __neg__(self) -> "PauliSum":
        return scale_and_add([(-1.0, self)])

    def __mul__(self, scalar: float) -> "PauliSum":
        return scale_and_add([(float(scalar), self)])

    __rmul__ = __mul__

    # --- structure ------------------------------------------------------

    @property
    def identity_coefficient(self) -> float:
        return self.coefficient(PauliString.identity(self.n_qubits))

    def trace(self) -> float:
        """Trace of the dense operator; only the identity term contributes."""
        return self.identity_coefficient * (1 << self.n_qubits)

    def support(self) -> Tuple[int, ...]:
        qubits = set()
        for _, string in self._terms:
            qubits.update(string.support)
        return tuple(sorted(qubits))

    def is_single_qubit_local(self) -> bool:
        """True when every term acts on at most one qubit."""
        return all(string.weight <= 1 for _, string in self._terms)

    def single_qubit_parts(self) -> Tuple[float, Dict[int, Tuple[float, float, float]]]:
        """
        Split a single-qubit-local sum into (identity coefficient,
        {qubit: (cx, cy, cz)}). Raises ValueError for non-local sums.
        """
        if not self.is_single_qubit_local():
            raise ValueError("sum has multi-qubit terms")
        identity = 0.0
        parts: Dict[int, List[float]] = {}
        for coeff, string in self._terms:
            if string.is_identity:
                identity += coeff
                continue
            (qubit,) = string.support
            slot = "XYZ".index(string.factor(qubit))
            parts.setdefault(qubit, [0.0, 0.0, 0.0])[slot] += coeff
        return identity, {q: (c[0], c[1], c[2]) for q, c in sorted(parts.items())}

    # --- realization ----------------------------------------------------

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Return H|v> term by term without building the dense matrix."""
        out = np.zeros(1 << self.n_qubits, dtype=complex)
        for coeff, string in self._terms:
            out += coeff * string.apply(vector)
        return out

    def to_dense(self, cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
        check_cap(self.n_qubits, cap)
        dim = 1 << self.n_qubits
        matrix = np.zeros((dim, dim), dtype=complex)
        for coeff, string in self._terms:
            matrix += coeff * string.to_dense(cap)
        return matrix

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{coeff:.6g}*{string.label}" for coeff, string in self._terms)

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, terms={len(self._terms)})"


# ============================================================
# OPERATIONS
# ============================================================

def scale_and_add(sums: Sequence[Tuple[float, PauliSum]]) -> PauliSum:
    """Canonical sum of weighted PauliSums."""
    if not sums:
        raise DimensionError("scale_and_add needs at least one operand")
    n_qubits = sums[0][1].n_qubits
    terms: List[Term] = []
    for weight, operand in sums:
        _check_same_size(n_qubits, operand.n_qubits)
        terms.extend((weight * coeff, string) for coeff, string in operand)
    return PauliSum(n_qubits, terms)


def commutator_i(a: PauliSum, b: PauliSum) -> PauliSum:
    """
    The Hermitian operator i[a, b] as a canonical real PauliSum.

    Commuting string pairs cancel. An anticommuting pair gives
    i(PQ - QP) = 2i PQ, and PQ carries a phase of +-i, so every contribution
    is exactly real.
    """
    _check_same_size(a.n_qubits, b.n_qubits)
    acc: Dict[PauliString, float] = {}
    for ca, sa in a:
        for cb, sb in b:
            if sa.commutes_with(sb):
                continue
            phase, product = multiply(sa, sb)
            acc[product] = acc.get(product, 0.0) + 2.0 * ca * cb * (1j * phase).real
    result = PauliSum(a.n_qubits, ((coeff, string) for string, coeff in acc.items()))
    logger.debug("i[a,b]: %d x %d terms -> %d terms", len(a), len(b), len(result))
    return result


def to_dense(s: PauliSum, cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a PauliSum."""
    return s.to_dense(cap)
