"""Vectorized numpy gate kernels (pure-Python fallback backend).

Basis convention: qubit 0 is the least significant bit of the array index.
A gate on targets (a, b) is a 4x4 matrix whose own index bit 0 belongs to
target a and bit 1 to target b.

State kernels update the amplitude array in place.  Conjugation kernels
compute U^dagger . O . U as two passes of the one-sided gate kernel:
a right pass multiplying by U on the column index, then a left pass
multiplying by U^dagger on the row index.
"""

import numpy as np

BACKEND = "python"


def apply_1q(state: np.ndarray, u: np.ndarray, q: int) -> None:
    """In place state <- U|state> for a 2x2 unitary on qubit q."""
    tk = 1 << q
    v = state.reshape(-1, 2, tk)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    v[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def apply_2q(state: np.ndarray, u: np.ndarray, qa: int, qb: int) -> None:
    """In place state <- U|state> for a 4x4 unitary on qubits (qa, qb)."""
    q1, q2 = (qa, qb) if qa < qb else (qb, qa)
    low = 1 << q1
    mid = 1 << (q2 - q1 - 1)
    v = state.reshape(-1, 2, mid, 2, low)
    # gate index r = bit(qa) + 2*bit(qb); map to the (axis-q2, axis-q1) slots
    if qa < qb:
        slot = lambda r: (slice(None), (r >> 1) & 1, slice(None), r & 1, slice(None))
    else:
        slot = lambda r: (slice(None), r & 1, slice(None), (r >> 1) & 1, slice(None))
    a = [v[slot(r)].copy() for r in range(4)]
    for r in range(4):
        v[slot(r)] = u[r, 0] * a[0] + u[r, 1] * a[1] + u[r, 2] * a[2] + u[r, 3] * a[3]


def conj_1q(op: np.ndarray, u: np.ndarray, q: int) -> None:
    """In place op <- U^dagger . op . U for a 2x2 unitary on qubit q."""
    d = op.shape[0]
    tk = 1 << q
    uc = u.conj()
    # right pass: mix column pairs with U
    v = op.reshape(d, -1, 2, tk)
    c0 = v[:, :, 0, :].copy()
    c1 = v[:, :, 1, :]
    v[:, :, 0, :] = c0 * u[0, 0] + c1 * u[1, 0]
    v[:, :, 1, :] = c0 * u[0, 1] + c1 * u[1, 1]
    # left pass: mix row pairs with U^dagger
    w = op.reshape(-1, 2, tk, d)
    r0 = w[:, 0, :, :].copy()
    r1 = w[:, 1, :, :]
    w[:, 0, :, :] = uc[0, 0] * r0 + uc[1, 0] * r1
    w[:, 1, :, :] = uc[0, 1] * r0 + uc[1, 1] * r1


def conj_2q(op: np.ndarray, u: np.ndarray, qa: int, qb: int) -> None:
    """In place op <- U^dagger . op . U for a 4x4 unitary on qubits (qa, qb)."""
    d = op.shape[0]
    q1, q2 = (qa, qb) if qa < qb else (qb, qa)
    low = 1 << q1
    mid = 1 << (q2 - q1 - 1)
    uc = u.conj()
    if qa < qb:
        bits = lambda r: ((r >> 1) & 1, r & 1)
    else:
        bits = lambda r: (r & 1, (r >> 1) & 1)

    # right pass on the column index: O <- O . U
    v = op.reshape(d, -1, 2, mid, 2, low)
    col = lambda r: (slice(None), slice(None), bits(r)[0], slice(None), bits(r)[1], slice(None))
    a = [v[col(r)].copy() for r in range(4)]
    for r in range(4):
        v[col(r)] = a[0] * u[0, r] + a[1] * u[1, r] + a[2] * u[2, r] + a[3] * u[3, r]

    # left pass on the row index: O <- U^dagger . O
    w = op.reshape(-1, 2, mid, 2, low, d)
    row = lambda r: (slice(None), bits(r)[0], slice(None), bits(r)[1], slice(None), slice(None))
    a = [w[row(r)].copy() for r in range(4)]
    for r in range(4):
        w[row(r)] = uc[0, r] * a[0] + uc[1, r] * a[1] + uc[2, r] * a[2] + uc[3, r] * a[3]
