import numpy as np
import pytest
from numpy.testing import assert_allclose

from wfqae.errors import DimensionError, ParseError, QubitCapError
from wfqae.models import build_paper_controls
from wfqae.pauli import PauliString, PauliSum, commutator_i, multiply, scale_and_add, to_dense

from .conftest import random_pauli_sum

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def ps(label):
    return PauliString.from_label(label)


class TestPauliString:
    def test_label_round_trip(self):
        for label in ["I", "XYZ", "ZIXY", "YYYY"]:
            assert ps(label).label == label

    def test_qubit_zero_is_leftmost_factor(self):
        assert_allclose(ps("ZI").to_dense(), np.kron(Z, I2))
        assert_allclose(ps("IX").to_dense(), np.kron(I2, X))
        assert_allclose(ps("XYZ").to_dense(), np.kron(np.kron(X, Y), Z))

    def test_equality_and_hash(self):
        assert ps("XZ") == ps("XZ")
        assert ps("XZ") != ps("ZX")
        assert len({ps("XZ"), ps("XZ"), ps("IZ")}) == 2

    def test_rejects_bad_characters(self):
        with pytest.raises(ParseError):
            ps("XQ")
        with pytest.raises(ParseError):
            ps("")

    def test_support_and_weight(self):
        s = ps("IXIZ")
        assert s.support == (1, 3)
        assert s.weight == 2
        assert ps("III").is_identity

    def test_apply_matches_dense(self, rng):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        for label in ["XYZ", "YIY", "ZZI", "IXX"]:
            assert_allclose(ps(label).apply(v), ps(label).to_dense() @ v, atol=1e-14)

    def test_commutes_with(self):
        assert not ps("X").commutes_with(ps("Z"))
        assert ps("XX").commutes_with(ps("ZZ"))
        assert ps("ZI").commutes_with(ps("IZ"))


class TestMultiply:
    def test_x_times_z(self):
        phase, product = multiply(ps("X"), ps("Z"))
        assert phase == -1j
        assert product == ps("Y")

    def test_identity(self):
        phase, product = multiply(ps("II"), ps("ZX"))
        assert phase == 1
        assert product == ps("ZX")

    def test_involution(self):
        phase, product = multiply(ps("Y"), ps("Y"))
        assert phase == 1
        assert product.is_identity

    def test_mismatched_sizes(self):
        with pytest.raises(DimensionError):
            multiply(ps("X"), ps("XX"))

    @pytest.mark.parametrize("n_qubits", [1, 2, 3])
    def test_matches_dense_product(self, rng, n_qubits):
        dim = 1 << n_qubits
        for _ in range(30):
            a = PauliString(n_qubits, int(rng.integers(dim)), int(rng.integers(dim)))
            b = PauliString(n_qubits, int(rng.integers(dim)), int(rng.integers(dim)))
            phase, product = multiply(a, b)
            assert_allclose(phase * product.to_dense(), a.to_dense() @ b.to_dense(), atol=1e-14)

    def test_associative_against_dense(self, rng):
        for _ in range(30):
            a, b, c = (PauliString(3, int(rng.integers(8)), int(rng.integers(8))) for _ in range(3))
            p_ab, ab = multiply(a, b)
            p_abc, abc = multiply(ab, c)
            p_bc, bc = multiply(b, c)
            p_a_bc, a_bc = multiply(a, bc)
            assert abc == a_bc
            assert p_ab * p_abc == pytest.approx(p_bc * p_a_bc)
            assert_allclose(p_ab * p_abc * abc.to_dense(), a.to_dense() @ b.to_dense() @ c.to_dense(), atol=1e-14)


class TestPauliSum:
    def test_canonical_merge(self):
        s = PauliSum.from_labels([(1.0, "XI"), (0.5, "XI"), (2.0, "IZ"), (-2.0, "IZ")])
        assert len(s) == 1
        assert s.coefficient("XI") == 1.5
        assert s.coefficient("IZ") == 0.0

    def test_drops_dust(self):
        s = PauliSum.from_labels([(1e-15, "X"), (1.0, "Z")])
        assert s.strings == [ps("Z")]

    def test_rejects_complex_coefficients(self):
        with pytest.raises(ValueError):
            PauliSum(1, [(1j, ps("X"))])

    @pytest.mark.parametrize("coeff", [float("nan"), float("inf"), -np.inf])
    def test_rejects_non_finite_coefficients(self, coeff):
        with pytest.raises(ValueError):
            PauliSum(1, [(coeff, ps("X"))])

    def test_rejects_mixed_sizes(self):
        with pytest.raises(DimensionError):
            PauliSum(2, [(1.0, ps("X"))])

    def test_text_round_trip_is_bit_exact(self, lih):
        again = PauliSum.from_text(lih.to_text())
        assert again == lih
        for (c1, s1), (c2, s2) in zip(lih, again):
            assert c1 == c2 and s1 == s2

    def test_text_format(self):
        s = PauliSum.from_text("# comment\n0.1957 XXI\n\n-1 ZZI  # trailing\n")
        assert s.coefficient("XXI") == 0.1957
        assert s.coefficient("ZZI") == -1.0
        inline = PauliSum.from_text("1 Z; 0.5 X")
        assert inline.coefficient("X") == 0.5

    @pytest.mark.parametrize("text", ["nan Z; 1 X", "inf Z", "1 X\n-inf Z"])
    def test_text_rejects_non_finite(self, text):
        with pytest.raises(ParseError, match="not finite"):
            PauliSum.from_text(text)

    @pytest.mark.parametrize("text", ["1.0 XQ", "abc XX", "1.0", "1 XX; 1 X", ""])
    def test_text_rejects_malformed(self, text):
        with pytest.raises(ParseError):
            PauliSum.from_text(text)

    def test_arithmetic(self):
        x = PauliSum.from_label("X")
        z = PauliSum.from_label("Z")
        assert (x + x) == 2 * x
        assert (x - x).is_empty
        assert (-z).coefficient("Z") == -1.0

    def test_single_qubit_parts(self):
        s = PauliSum.from_text("0.5 III; 1 ZII; 2 XII; 3 IIY")
        assert s.is_single_qubit_local()
        identity, parts = s.single_qubit_parts()
        assert identity == 0.5
        assert parts == {0: (2.0, 0.0, 1.0), 2: (0.0, 3.0, 0.0)}
        assert not PauliSum.from_label("XX").is_single_qubit_local()


class TestToDense:
    def test_z(self):
        assert_allclose(to_dense(PauliSum.from_label("Z")), np.diag([1, -1]))

    def test_empty_sum_is_zero(self):
        assert_allclose(to_dense(PauliSum.zero(2)), np.zeros((4, 4)))

    def test_lih_trace_and_hermiticity(self, lih):
        dense = to_dense(lih)
        assert dense.shape == (8, 8)
        assert np.trace(dense).real == pytest.approx(8 * -7.0582, abs=1e-12)
        assert lih.trace() == pytest.approx(-56.4656, abs=1e-12)
        assert_allclose(dense, dense.conj().T, atol=1e-12)

    def test_cap(self):
        with pytest.raises(QubitCapError):
            to_dense(PauliSum.from_label("Z" * 13))
        with pytest.raises(QubitCapError):
            to_dense(PauliSum.from_label("ZZZ"), cap=2)

    def test_linear(self, rng):
        a = random_pauli_sum(rng, 2, 5)
        b = random_pauli_sum(rng, 2, 5)
        assert_allclose(to_dense(scale_and_add([(2.0, a), (-0.5, b)])), 2 * to_dense(a) - 0.5 * to_dense(b), atol=1e-12)


class TestScaleAndAdd:
    def test_doubling(self):
        x = PauliSum.from_label("X")
        assert scale_and_add([(1, x), (1, x)]) == PauliSum.from_label("X", 2.0)

    def test_cancellation(self):
        x = PauliSum.from_label("X")
        assert scale_and_add([(1, x), (-1, x)]).is_empty

    def test_linearity(self):
        z = PauliSum.from_label("Z")
        x_plus_z = PauliSum.from_text("1 X; 1 Z")
        result = scale_and_add([(2, z), (3, x_plus_z)])
        assert result == PauliSum.from_text("3 X; 5 Z")

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            scale_and_add([(1, PauliSum.from_label("X")), (1, PauliSum.from_label("XX"))])


def dense_commutator_i(a, b):
    da, db = to_dense(a), to_dense(b)
    return 1j * (da @ db - db @ da)


class TestCommutator:
    def test_x_z(self):
        result = commutator_i(PauliSum.from_label("X"), PauliSum.from_label("Z"))
        assert result == PauliSum.from_label("Y", 2.0)

    def test_commuting_operators(self):
        assert commutator_i(PauliSum.from_label("ZI"), PauliSum.from_label("IZ")).is_empty

    def test_lih_control_against_dense(self, lih):
        hc = scale_and_add([(1.0, c) for c in build_paper_controls()])
        assert_allclose(to_dense(commutator_i(hc, lih)), dense_commutator_i(hc, lih), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            commutator_i(PauliSum.from_label("X"), PauliSum.from_label("XX"))

    @pytest.mark.parametrize("n_qubits", [1, 2, 3, 4])
    def test_random_against_dense(self, rng, n_qubits):
        for _ in range(10):
            a = random_pauli_sum(rng, n_qubits, 6)
            b = random_pauli_sum(rng, n_qubits, 6)
            result = commutator_i(a, b)
            assert_allclose(to_dense(result), dense_commutator_i(a, b), atol=1e-12)
            assert all(isinstance(c, float) for c, _ in result)

    def test_self_commutator_vanishes(self, rng):
        for _ in range(10):
            a = random_pauli_sum(rng, 3, 8)
            assert commutator_i(a, a).is_empty

    def test_antisymmetry(self, rng):
        for _ in range(10):
            a = random_pauli_sum(rng, 3, 6)
            b = random_pauli_sum(rng, 3, 6)
            assert commutator_i(a, b).allclose(scale_and_add([(-1.0, commutator_i(b, a))]), atol=1e-14)
