"""
End-to-end checks of the LiH four-state run and the properties every run
must keep (descent, orthogonality, reductions, estimation accounting).
"""

import numpy as np
import pytest

from wfqae.algorithms import Ensemble, run_falqon, run_wfqae
from wfqae.feedback import (
    CommutatorObservables,
    FeedbackConfig,
    FeedbackLaw,
    FeedbackMode,
    predict_layer_cost,
)
from wfqae.models import random_problem
from wfqae.pauli import PauliSum, commutator_i, scale_and_add, to_dense
from wfqae.spectrum import diagonalize, fidelity
from wfqae.statevector import StateVector, apply_generator, expectation, prepare_pm_state

from .conftest import LIH_WEIGHTS, random_unit_vector

DEPTH = 20


@pytest.fixture
def lih_run(lih, lih_controls, lih_initials, lih_feedback):
    return run_wfqae(lih, lih_controls, Ensemble(lih_initials), lih_feedback, DEPTH)


class TestLiHReproduction:
    def test_fidelities_above_threshold(self, lih_run):
        _, trace = lih_run
        assert len(trace) == DEPTH
        assert all(f > 0.75 for f in trace.final.fidelities), trace.final.fidelities

    def test_reference_values(self, lih_run):
        _, trace = lih_run
        np.testing.assert_allclose(trace.final.fidelities, [0.961, 0.928, 0.785, 0.763], atol=5e-3)
        assert trace.initial.lyapunov == pytest.approx(-141.4304, abs=1e-3)
        assert trace.final.lyapunov == pytest.approx(-150.908666, abs=1e-4)

    def test_lyapunov_monotone(self, lih_run):
        _, trace = lih_run
        v = trace.lyapunov_values()
        assert np.all(v[1:] <= v[:-1] + 1e-9)
        assert trace.lyapunov_breaches == 0

    def test_energies_move_toward_exact_levels(self, lih_run, lih):
        _, trace = lih_run
        exact = diagonalize(lih).lowest(4)
        assert trace.eigenvalues == exact
        for q in range(4):
            assert abs(trace.final.energies[q] - exact[q]) < abs(trace.initial.energies[q] - exact[q])

    def test_orthogonality_preserved(self, lih_run):
        _, trace = lih_run
        assert trace.max_overlap() < 1e-8


def test_symbolic_algebra_matches_dense_oracle():
    rng = np.random.default_rng(99)
    for seed in range(100):
        n_qubits = 1 + seed % 3
        n_terms = min(4 ** n_qubits - 1, 3 + seed % 4)
        drift, (control,) = random_problem(n_qubits, n_terms, seed)
        dd, dc = to_dense(drift), to_dense(control)
        observable = commutator_i(control, drift)
        np.testing.assert_allclose(to_dense(observable), 1j * (dc @ dd - dd @ dc), atol=1e-12)

        state = StateVector(n_qubits, random_unit_vector(rng, n_qubits))
        psi = state.amplitudes
        for op in (drift, observable):
            dense = (psi.conj() @ to_dense(op) @ psi).real
            assert expectation(state, op) == pytest.approx(dense, abs=1e-10)


def test_weighted_run_with_one_register_is_falqon(lih, lih_controls):
    initial = prepare_pm_state(3, "-++")
    falqon = FeedbackConfig(dt=0.05, gains=[1.0, 1.0, 1.0])
    weighted = FeedbackConfig(dt=0.05, gains=[1.0, 1.0, 1.0], weights=[1.0], mode="weighted_full")
    c1, t1 = run_falqon(lih, lih_controls, initial, falqon, DEPTH)
    c2, t2 = run_wfqae(lih, lih_controls, [initial], weighted, DEPTH)
    assert t1.records == t2.records
    assert c1.layers == c2.layers
    assert np.array_equal(t1.final_states[0].amplitudes, t2.final_states[0].amplitudes)


class TestEigenstateFixedPoint:
    def test_lih_lowest_eigenstates(self, lih, lih_controls, lih_feedback):
        spectrum = diagonalize(lih)
        _, trace = run_wfqae(lih, lih_controls, [spectrum.state(q) for q in range(4)], lih_feedback, DEPTH)
        assert np.max(np.abs(trace.alphas())) < 1e-9
        energies = trace.energies()
        np.testing.assert_allclose(energies, np.broadcast_to(energies[0], energies.shape), atol=1e-9)

    def test_random_problem_excited_state(self):
        drift, controls = random_problem(3, 6, seed=5)
        eigenstate = diagonalize(drift).state(2)
        _, trace = run_falqon(drift, controls, eigenstate, FeedbackConfig(dt=0.05), DEPTH)
        assert np.max(np.abs(trace.alphas())) < 1e-9
        np.testing.assert_allclose(trace.energies()[:, 0], trace.initial.energies[0], atol=1e-9)


class TestPthStateOnly:
    def pth_config(self, gains):
        return FeedbackConfig(dt=0.05, gains=gains, weights=[1.0, 0.5], mode=FeedbackMode.WEIGHTED_PTH_ONLY)

    def test_first_excited_state_on_fixed_two_qubit_model(self):
        drift = PauliSum.from_text("1 ZI; 0.6 IZ; 0.5 XX; 0.3 ZZ")
        controls = [PauliSum.from_text("1 ZI; 1 XI"), PauliSum.from_text("1 IZ; 1 IX")]
        initials = [prepare_pm_state(2, "+-"), prepare_pm_state(2, "-+")]
        _, trace = run_wfqae(drift, controls, initials, self.pth_config([1.0, 1.0]), depth=200)
        start, end = trace.initial.fidelities[1], trace.final.fidelities[1]
        assert end > start
        assert end > 0.9

    @pytest.mark.parametrize("seed", [8, 28])
    def test_first_excited_state_on_seeded_random_model(self, seed):
        drift, controls = random_problem(2, 4, seed=seed)
        initials = [prepare_pm_state(2, "+-"), prepare_pm_state(2, "-+")]
        _, trace = run_wfqae(drift, controls, initials, self.pth_config([1.0]), depth=200)
        start, end = trace.initial.fidelities[1], trace.final.fidelities[1]
        assert end > start
        assert end > 0.9
        assert trace.max_overlap() < 1e-8


def test_single_multi_control_reduces_to_single_control(lih, lih_controls, lih_initials):
    hc = scale_and_add([(1.0, c) for c in lih_controls])
    cfg = FeedbackConfig(dt=0.05, gains=[1.0], weights=LIH_WEIGHTS, mode=FeedbackMode.WEIGHTED_FULL)
    circuit, trace = run_wfqae(lih, [hc], lih_initials, cfg, DEPTH)

    law = FeedbackLaw(cfg, CommutatorObservables.from_hamiltonians(lih, [hc]))
    states = list(lih_initials)
    alpha = 0.0
    for k in range(DEPTH):
        assert circuit.layers[k] == [alpha]
        states = [apply_generator(apply_generator(s, lih, cfg.dt), hc, alpha * cfg.dt) for s in states]
        (alpha,) = law.next_alphas(law.measure(states))
    for ours, theirs in zip(trace.final_states, states):
        assert np.array_equal(ours.amplitudes, theirs.amplitudes)
    assert trace.final.next_alphas == [alpha]


def test_estimation_count_is_linear_in_p(lih, lih_controls, lih_initials):
    n_terms = CommutatorObservables.from_hamiltonians(lih, lih_controls).n_terms
    counts = []
    for p in range(4):
        cfg = FeedbackConfig(dt=0.05, gains=[1.0] * 3, weights=LIH_WEIGHTS[: p + 1], mode="weighted_full")
        _, trace = run_wfqae(lih, lih_controls, lih_initials[: p + 1], cfg, depth=3)
        assert trace.n_terms == n_terms
        assert all(r.estimations == (p + 1) * n_terms for r in trace.layers)
        assert trace.final.cumulative_estimations == 3 * predict_layer_cost(p, n_terms)
        counts.append(trace.final.estimations)
    assert counts == [counts[0] * (p + 1) for p in range(4)]


def test_fidelity_definition_is_squared_overlap(lih, lih_initials):
    spectrum = diagonalize(lih)
    state = lih_initials[0]
    amplitude = np.vdot(spectrum.eigenvectors[:, 0], state.amplitudes)
    assert fidelity(state, spectrum, 0) == pytest.approx(abs(amplitude) ** 2)
