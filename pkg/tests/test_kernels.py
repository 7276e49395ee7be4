"""Kernel backends against the explicit Kronecker/embedding oracle."""

import numpy as np
import pytest

from floqmbl import kernels

from _oracles import embed_gate, haar_unitary


def _random_state(rng, L):
    d = 1 << L
    s = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return s / np.linalg.norm(s)


def _random_matrix(rng, L):
    d = 1 << L
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_apply_1q_matches_dense_embedding(kernel_backend, rng, L):
    for q in range(L):
        u = haar_unitary(rng, 2)
        s = _random_state(rng, L)
        out = s.copy()
        kernel_backend.apply_1q(out, u, q)
        ref = embed_gate(u, (q,), L) @ s
        assert np.abs(out - ref).max() <= 1e-12


@pytest.mark.parametrize("L", [2, 3, 4])
def test_apply_2q_matches_dense_embedding(kernel_backend, rng, L):
    pairs = [(a, b) for a in range(L) for b in range(L) if a != b]
    for qa, qb in pairs:
        u = haar_unitary(rng, 4)
        s = _random_state(rng, L)
        out = s.copy()
        kernel_backend.apply_2q(out, u, qa, qb)
        ref = embed_gate(u, (qa, qb), L) @ s
        assert np.abs(out - ref).max() <= 1e-12


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_conj_1q_matches_dense_conjugation(kernel_backend, rng, L):
    for q in range(L):
        u = haar_unitary(rng, 2)
        m = _random_matrix(rng, L)
        out = m.copy()
        kernel_backend.conj_1q(out, u, q)
        big = embed_gate(u, (q,), L)
        ref = big.conj().T @ m @ big
        assert np.abs(out - ref).max() <= 1e-12


@pytest.mark.parametrize("L", [2, 3, 4])
def test_conj_2q_matches_dense_conjugation(kernel_backend, rng, L):
    pairs = [(a, b) for a in range(L) for b in range(L) if a != b]
    for qa, qb in pairs:
        u = haar_unitary(rng, 4)
        m = _random_matrix(rng, L)
        out = m.copy()
        kernel_backend.conj_2q(out, u, qa, qb)
        big = embed_gate(u, (qa, qb), L)
        ref = big.conj().T @ m @ big
        assert np.abs(out - ref).max() <= 1e-12


def test_backends_agree_on_long_random_sequence(rng):
    names = kernels.available_backends()
    if len(names) < 2:
        pytest.skip("only one kernel backend built")
    impls = [kernels.get_backend(n) for n in names]
    L = 5
    states = [_random_state(rng, L) for _ in impls]
    states = [states[0].copy() for _ in impls]
    mats = [_random_matrix(rng, L) for _ in impls]
    mats = [mats[0].copy() for _ in impls]
    for _ in range(50):
        if rng.random() < 0.5:
            u, q = haar_unitary(rng, 2), int(rng.integers(L))
            for impl, s, m in zip(impls, states, mats):
                impl.apply_1q(s, u, q)
                impl.conj_1q(m, u, q)
        else:
            u = haar_unitary(rng, 4)
            qa, qb = rng.choice(L, size=2, replace=False)
            for impl, s, m in zip(impls, states, mats):
                impl.apply_2q(s, u, int(qa), int(qb))
                impl.conj_2q(m, u, int(qa), int(qb))
    for s in states[1:]:
        assert np.abs(s - states[0]).max() <= 1e-12
    for m in mats[1:]:
        assert np.abs(m - mats[0]).max() <= 1e-12


def test_norm_preserved_over_1000_random_gates(rng):
    L = 6
    s = _random_state(rng, L)
    for _ in range(1000):
        if rng.random() < 0.5:
            kernels.apply_1q(s, haar_unitary(rng, 2), int(rng.integers(L)))
        else:
            qa, qb = rng.choice(L, size=2, replace=False)
            kernels.apply_2q(s, haar_unitary(rng, 4), int(qa), int(qb))
    assert abs(np.vdot(s, s).real - 1.0) <= 1e-10
