import math

import numpy as np
import pytest

import qblock as qb
from qblock.circuit import Circuit, Register
from qblock.simulator import (MAX_QUBITS, SimulationError, apply_rus, array_from_json, array_to_json,
                              extract_block, hadamard_test, postselect_zero, run)
from conftest import REF_A, PAULI_X, PAULI_Z, RHS, random_hermitian


def test_h_on_zero():
    c = Circuit([Register("q", 1)])
    c.h(0)
    assert np.allclose(run(c), [1 / math.sqrt(2)] * 2)


def test_cx_flips_target():
    # |10> in ket order (q1 q0) with q0 = 1 is index 1; control q0, target q1
    c = Circuit([Register("q", 2)])
    c.cx(0, 1)
    psi = np.zeros(4)
    psi[1] = 1
    assert np.allclose(run(c, psi), np.eye(4)[3])


def test_norm_preserved(rng):
    from test_circuit import random_circuit

    c = random_circuit(rng, 6, 80, max_controls=3)
    psi = rng.normal(size=64) + 1j * rng.normal(size=64)
    psi /= np.linalg.norm(psi)
    assert abs(np.linalg.norm(run(c, psi)) - 1) < 1e-12


def test_dimension_mismatch():
    c = Circuit([Register("q", 2)])
    with pytest.raises(SimulationError):
        run(c, np.ones(8))


def test_budget_exceeded():
    c = Circuit([Register("q", MAX_QUBITS + 1)])
    with pytest.raises(SimulationError):
        run(c)


class TestExtractBlock:
    def test_pauli_z(self):
        assert np.allclose(extract_block(qb.from_array(PAULI_Z)), PAULI_Z)

    def test_lcu_sum(self):
        E = qb.from_array(PAULI_Z + PAULI_X)
        assert E.alpha == pytest.approx(2)
        assert np.allclose(extract_block(E), (PAULI_Z + PAULI_X) / 2, atol=1e-12)

    def test_reference_matrix(self):
        E = qb.from_array(REF_A)
        assert np.abs(E.alpha * extract_block(E) - REF_A).max() < 1e-9


class TestPostselect:
    def test_z_on_plus(self):
        r = apply_rus(qb.from_array(PAULI_Z), [1, 1])
        assert r.success_probability == pytest.approx(1)
        assert np.allclose(r.state, [1 / math.sqrt(2), -1 / math.sqrt(2)])

    def test_annihilated_state(self):
        E = qb.from_projector(0, 0, n=1)
        circ = E.apply([0, 1])
        res = postselect_zero(run(circ), circ.qubits_by_role("ancilla"), circ.num_qubits)
        assert res.degenerate and res.success_probability < 1e-15
        with pytest.raises(SimulationError):
            apply_rus(E, [0, 1])

    def test_probability_law(self, rng):
        A = random_hermitian(rng, 8)
        E = qb.from_array(A)
        v = rng.normal(size=8)
        v /= np.linalg.norm(v)
        r = apply_rus(E, v)
        assert abs(r.success_probability - np.linalg.norm(A @ v) ** 2 / E.alpha ** 2) < 1e-10
        x = A @ v
        assert np.allclose(r.state, x / np.linalg.norm(x), atol=1e-10)


class TestRepeatUntilSuccess:
    def test_identity_encoding(self):
        r = apply_rus(qb.from_eye(0, 2), [0, 1, 1, 1])
        assert r.success_probability == pytest.approx(1)
        assert np.allclose(r.state, RHS / np.linalg.norm(RHS))

    def test_geometric_attempts(self):
        E = qb.from_array(REF_A)
        r = apply_rus(E, RHS, trials=10_000, seed=3)
        mean = r.attempts.mean()
        assert abs(mean - 1 / r.success_probability) < 0.1 / r.success_probability
        assert r.attempts.min() >= 1

    def test_sampling_is_seeded(self):
        E = qb.from_array(REF_A)
        a = apply_rus(E, RHS, trials=50, seed=9).attempts
        b = apply_rus(E, RHS, trials=50, seed=9).attempts
        assert np.array_equal(a, b)


class TestHadamardTest:
    def test_z_plus(self):
        assert abs(hadamard_test(qb.from_array(PAULI_Z), [1, 1])) < 1e-12

    def test_z_zero(self):
        assert hadamard_test(qb.from_array(PAULI_Z), [1, 0]) == pytest.approx(1)

    def test_reference_quadratic_form(self):
        psi = RHS / np.linalg.norm(RHS)
        val = hadamard_test(qb.from_array(REF_A), RHS)
        assert abs(val - psi @ REF_A @ psi) < 1e-9

    def test_real_and_imag_parts(self, rng):
        # non-Hermitian operator so the imaginary part is nonzero
        M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        E = qb.from_array(M)
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        z = hadamard_test(E, v, "real") + 1j * hadamard_test(E, v, "imag")
        assert abs(z - np.vdot(v, M @ v)) < 1e-9

    def test_random_hermitian_8(self, rng):
        A = random_hermitian(rng, 8)
        v = rng.normal(size=8)
        v /= np.linalg.norm(v)
        E = qb.from_array(A)
        z = hadamard_test(E, v, "real") + 1j * hadamard_test(E, v, "imag")
        assert abs(z - np.vdot(v, A @ v)) < 1e-9

    def test_shots_mode(self):
        E = qb.from_array(PAULI_Z)
        est = hadamard_test(E, [1, 0], shots=2000, seed=1)
        assert est == pytest.approx(1)
        est = hadamard_test(E, [1, 1], shots=20000, seed=1)
        assert abs(est) < 0.05

    def test_shape_mismatch(self):
        with pytest.raises(Exception):
            hadamard_test(qb.from_array(PAULI_Z), [1, 0, 0, 0])


def test_array_json_round_trip(rng):
    M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.array_equal(array_from_json(array_to_json(M)), M)
    v = rng.normal(size=8)
    assert np.array_equal(array_from_json(array_to_json(v)), v)
    with pytest.raises(ValueError):
        array_from_json({"dim": 3, "data": [[1, 0]]})
