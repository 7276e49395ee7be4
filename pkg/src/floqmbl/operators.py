"""Dense Heisenberg-picture operators and Pauli strings.

A DenseOperator stores the full 2**L x 2**L matrix; conjugation by a gate
runs through the bit-indexed kernels and never materializes a 2**L x 2**L
gate matrix.  The normalized squared Hilbert-Schmidt size Tr(O^2)/2**L is
the central diagnostic: undressed Pauli strings have size exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .states import IMAG_TOL, Gate, StateVector

PAULI_MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class DenseOperator:
    """A 2**L x 2**L complex matrix in the StateVector basis ordering."""

    __slots__ = ("num_qubits", "entries")

    def __init__(self, num_qubits: int, entries: np.ndarray):
        if num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        dim = 1 << num_qubits
        entries = np.array(entries, dtype=np.complex128, order="C")
        if entries.shape != (dim, dim):
            raise ValueError(
                f"expected a {dim}x{dim} matrix for L={num_qubits}, "
                f"got shape {entries.shape}"
            )
        self.num_qubits = num_qubits
        self.entries = entries

    @classmethod
    def identity(cls, num_qubits: int) -> "DenseOperator":
        return cls(num_qubits, np.eye(1 << num_qubits, dtype=np.complex128))

    @classmethod
    def zero(cls, num_qubits: int) -> "DenseOperator":
        dim = 1 << num_qubits
        return cls(num_qubits, np.zeros((dim, dim), dtype=np.complex128))

    def copy(self) -> "DenseOperator":
        return DenseOperator(self.num_qubits, self.entries.copy())

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_defect(self) -> float:
        """Max |O - O^dagger| entry."""
        return float(np.abs(self.entries - self.entries.conj().T).max())

    def add_(self, other: "DenseOperator") -> "DenseOperator":
        """In-place accumulation self += other."""
        if other.num_qubits != self.num_qubits:
            raise ValueError("qubit count mismatch")
        self.entries += other.entries
        return self

    def __repr__(self):
        return f"DenseOperator(L={self.num_qubits})"


@dataclass(frozen=True)
class PauliString:
    """A product of single-site Pauli factors on distinct sites.

    ``factors`` is a tuple of (site, axis) pairs with axis in {X, Y, Z}.
    The empty string is the identity.
    """

    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        factors = tuple((int(s), str(a).upper()) for s, a in self.factors)
        object.__setattr__(self, "factors", factors)
        sites = [s for s, _ in factors]
        if len(set(sites)) != len(sites):
            raise ValueError(f"duplicate site in Pauli string {factors}")
        if any(s < 0 for s in sites):
            raise ValueError(f"negative site in Pauli string {factors}")
        for _, axis in factors:
            if axis not in PAULI_MATRICES:
                raise ValueError(f"unknown Pauli axis {axis!r}")

    @property
    def label(self) -> str:
        if not self.factors:
            return "I"
        return " ".join(f"{a}{s}" for s, a in sorted(self.factors))

    def max_site(self) -> int:
        return max((s for s, _ in self.factors), default=0)


def pauli_to_dense(p: PauliString, num_qubits: int) -> DenseOperator:
    """Tensor-product embedding of a Pauli string, identity elsewhere."""
    if p.factors and p.max_site() >= num_qubits:
        raise ValueError(
            f"Pauli site {p.max_site()} out of range for L={num_qubits}"
        )
    by_site = dict(p.factors)
    m = np.array([[1.0 + 0.0j]])
    # qubit 0 is the least significant bit, so it sits rightmost in the kron chain
    for site in range(num_qubits - 1, -1, -1):
        factor = PAULI_MATRICES.get(by_site.get(site, ""), np.eye(2, dtype=np.complex128))
        m = np.kron(m, factor)
    return DenseOperator(num_qubits, m)


def conjugate_operator(op: DenseOperator, gate: Gate) -> DenseOperator:
    """In place op <- U^dagger . op . U and return op."""
    if max(gate.targets) >= op.num_qubits:
        raise ValueError(
            f"gate targets {gate.targets} out of range for L={op.num_qubits}"
        )
    if gate.num_targets == 1:
        kernels.conj_1q(op.entries, gate.matrix, gate.targets[0])
    else:
        kernels.conj_2q(op.entries, gate.matrix, gate.targets[0], gate.targets[1])
    return op


def _real_with_tolerance(value: complex, what: str) -> float:
    scale = max(1.0, abs(value.real))
    if abs(value.imag) > IMAG_TOL * scale:
        raise ValueError(
            f"{what} has imaginary residue {value.imag:.3e} beyond tolerance"
        )
    return float(value.real)


def operator_size_sq(op: DenseOperator) -> float:
    """Normalized squared Hilbert-Schmidt size Tr(O . O)/2**L.

    Computed as sum_ij O_ij O_ji without forming the matrix product.
    """
    raw = complex(np.einsum("ij,ji->", op.entries, op.entries))
    return _real_with_tolerance(raw, "operator size") / (1 << op.num_qubits)


def expectation(state: StateVector, op: DenseOperator) -> float:
    """<psi|O|psi> for Hermitian O; the imaginary residue is checked and dropped."""
    if state.num_qubits != op.num_qubits:
        raise ValueError(
            f"state has L={state.num_qubits} but operator has L={op.num_qubits}"
        )
    raw = complex(np.vdot(state.amplitudes, op.entries @ state.amplitudes))
    return _real_with_tolerance(raw, "expectation value")
