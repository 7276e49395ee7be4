"""Gate validation and state-vector gate application."""

import numpy as np
import pytest
import scipy.linalg

from floqmbl import Gate, StateVector, apply_circuit, apply_gate

from _oracles import SX, SZ, haar_unitary


class TestGate:
    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="not unitary"):
            Gate(np.array([[1.0, 0.0], [0.0, 1.0 + 1e-6]]), (0,))

    def test_rejects_duplicate_targets(self):
        with pytest.raises(ValueError, match="duplicate"):
            Gate(np.eye(4), (1, 1))

    def test_rejects_negative_target(self):
        with pytest.raises(ValueError, match="negative"):
            Gate(np.eye(2), (-1,))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            Gate(np.eye(4), (0,))

    def test_matrix_is_frozen(self):
        g = Gate(np.eye(2), (0,))
        with pytest.raises(ValueError):
            g.matrix[0, 0] = 0.0

    def test_dagger_inverts(self, rng):
        u = haar_unitary(rng, 4)
        g = Gate(u, (0, 2), "u")
        assert np.allclose(g.matrix @ g.dagger().matrix, np.eye(4), atol=1e-12)


class TestApplyGate:
    def test_x_flips_qubit_zero(self):
        state = StateVector(2)  # |00>
        apply_gate(state, Gate(SX, (0,), "x"))
        expected = np.zeros(4)
        expected[1] = 1.0
        assert np.allclose(state.amplitudes, expected, atol=1e-15)

    def test_identity_leaves_state(self, rng):
        s = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        state = StateVector(3, s / np.linalg.norm(s))
        before = state.amplitudes.copy()
        apply_gate(state, Gate(np.eye(2), (1,)))
        assert np.array_equal(state.amplitudes, before)

    def test_z_rotation_matches_matrix_exponential(self):
        # exp(-i theta Z) at theta = pi/2 acting on |1>
        theta = np.pi / 2
        gate = Gate(scipy.linalg.expm(-1j * theta * SZ), (0,), "rz")
        state = StateVector.basis_state(1, 1)
        apply_gate(state, gate)
        assert abs(state.amplitudes[0]) <= 1e-15
        assert abs(state.amplitudes[1] - np.exp(1j * np.pi / 2)) <= 1e-12

    def test_target_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            apply_gate(StateVector(2), Gate(np.eye(2), (2,)))

    def test_norm_preserved_per_application(self, rng):
        s = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        state = StateVector(4, s / np.linalg.norm(s))
        for _ in range(20):
            before = state.norm_sq()
            if rng.random() < 0.5:
                apply_gate(state, Gate(haar_unitary(rng, 2), (int(rng.integers(4)),)))
            else:
                qa, qb = rng.choice(4, size=2, replace=False)
                apply_gate(state, Gate(haar_unitary(rng, 4), (int(qa), int(qb))))
            assert abs(state.norm_sq() - before) <= 1e-12

    def test_apply_circuit_order(self, rng):
        # X then Z on |0> gives Z X |0> = -|1>
        state = StateVector(1)
        apply_circuit(state, [Gate(SX, (0,)), Gate(SZ, (0,))])
        assert np.allclose(state.amplitudes, [0.0, -1.0], atol=1e-15)


class TestStateVector:
    def test_default_is_all_zeros_state(self):
        s = StateVector(3)
        assert s.amplitudes[0] == 1.0
        assert s.norm_sq() == pytest.approx(1.0)

    def test_basis_state_bounds(self):
        with pytest.raises(ValueError):
            StateVector.basis_state(2, 4)

    def test_amplitude_length_checked(self):
        with pytest.raises(ValueError):
            StateVector(2, np.zeros(3))

    def test_copy_is_independent(self):
        a = StateVector(1)
        b = a.copy()
        b.amplitudes[0] = 0.0
        assert a.amplitudes[0] == 1.0
