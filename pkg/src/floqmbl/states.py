"""State vectors and gates.

Amplitudes are indexed by computational-basis bitstrings with qubit 0 as
the least significant bit.  Gates are validated to be unitary at
construction; application happens in place through the kernel backend.
"""

from __future__ import annotations

import numpy as np

from . import kernels

UNITARITY_TOL = 1e-12
IMAG_TOL = 1e-10


class Gate:
    """A 1- or 2-qubit unitary bound to target qubit indices.

    The matrix of a two-qubit gate is indexed so that its own bit 0
    belongs to ``targets[0]`` and bit 1 to ``targets[1]``.
    """

    __slots__ = ("matrix", "targets", "label")

    def __init__(self, matrix, targets, label: str = ""):
        if isinstance(targets, (int, np.integer)):
            targets = (int(targets),)
        else:
            targets = tuple(int(t) for t in targets)
        if len(targets) not in (1, 2):
            raise ValueError(f"gates act on 1 or 2 qubits, got targets {targets}")
        if any(t < 0 for t in targets):
            raise ValueError(f"negative target index in {targets}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"duplicate target index in {targets}")
        m = np.array(matrix, dtype=np.complex128, order="C")
        dim = 2 ** len(targets)
        if m.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match {len(targets)} target(s)"
            )
        defect = np.abs(m.conj().T @ m - np.eye(dim)).max()
        if defect > UNITARITY_TOL:
            raise ValueError(
                f"matrix is not unitary (max |U^dag U - I| = {defect:.3e})"
            )
        m.setflags(write=False)
        self.matrix = m
        self.targets = targets
        self.label = label

    @property
    def num_targets(self) -> int:
        return len(self.targets)

    def dagger(self) -> "Gate":
        """The inverse gate."""
        label = self.label + "^dag" if self.label else ""
        return Gate(self.matrix.conj().T, self.targets, label)

    def __repr__(self):
        name = self.label or f"{self.num_targets}q-gate"
        return f"Gate({name!r}, targets={self.targets})"


class StateVector:
    """A pure state of ``num_qubits`` qubits as 2**L complex amplitudes."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray | None = None):
        if num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        dim = 1 << num_qubits
        if amplitudes is None:
            amplitudes = np.zeros(dim, dtype=np.complex128)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.array(amplitudes, dtype=np.complex128, order="C")
            if amplitudes.shape != (dim,):
                raise ValueError(
                    f"expected {dim} amplitudes for {num_qubits} qubits, "
                    f"got shape {amplitudes.shape}"
                )
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    @classmethod
    def basis_state(cls, num_qubits: int, index: int) -> "StateVector":
        """The computational basis state |index>."""
        dim = 1 << num_qubits
        if not 0 <= index < dim:
            raise ValueError(f"basis index {index} out of range for L={num_qubits}")
        amp = np.zeros(dim, dtype=np.complex128)
        amp[index] = 1.0
        return cls(num_qubits, amp)

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))

    def __repr__(self):
        return f"StateVector(L={self.num_qubits})"


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply a gate to the state in place and return the state."""
    if max(gate.targets) >= state.num_qubits:
        raise ValueError(
            f"gate targets {gate.targets} out of range for L={state.num_qubits}"
        )
    if gate.num_targets == 1:
        kernels.apply_1q(state.amplitudes, gate.matrix, gate.targets[0])
    else:
        kernels.apply_2q(state.amplitudes, gate.matrix, gate.targets[0], gate.targets[1])
    return state


def apply_circuit(state: StateVector, gates) -> StateVector:
    """Apply a gate sequence in order."""
    for g in gates:
        apply_gate(state, g)
    return state
