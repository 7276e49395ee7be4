"""Compare the compiled and pure-numpy kernel backends.

Times the three workloads that dominate production runs: single-gate
state application, single-gate operator conjugation, and one full
Heisenberg period step (conjugation by every gate of a period).

    python benchmarks/benchmark_kernels.py [--qubits 8 10] [--repeats 5]
"""

import argparse
import time

import numpy as np

from floqmbl import CircuitConfig, QuasiPeriodicParams, build_period
from floqmbl.kernels import available_backends, get_backend


def _best_of(repeats, fn):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _period(L):
    return build_period(
        CircuitConfig(
            L,
            QuasiPeriodicParams(0.8, 0.16, phase=0.3),
            QuasiPeriodicParams(0.2, 0.04, phase=0.3),
            0.1,
        )
    )


def bench_backend(impl, L, repeats):
    rng = np.random.default_rng(7)
    d = 1 << L
    state = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    op = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    u2 = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    u4 = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    period = _period(L)

    def one_period_conj():
        for gate in reversed(period.gates):
            if gate.num_targets == 1:
                impl.conj_1q(op, gate.matrix, gate.targets[0])
            else:
                impl.conj_2q(op, gate.matrix, gate.targets[0], gate.targets[1])

    rows = {
        "apply_1q": _best_of(repeats, lambda: impl.apply_1q(state, u2, L // 2)),
        "apply_2q": _best_of(repeats, lambda: impl.apply_2q(state, u4, 0, L - 1)),
        "conj_1q": _best_of(repeats, lambda: impl.conj_1q(op, u2, L // 2)),
        "conj_2q": _best_of(repeats, lambda: impl.conj_2q(op, u4, 0, L - 1)),
        "period_conj": _best_of(repeats, one_period_conj),
    }
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, nargs="+", default=[8, 10])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    for L in args.qubits:
        print(f"\nL = {L} (state dim {1 << L}, operator {1 << L}x{1 << L})")
        results = {name: bench_backend(get_backend(name), L, args.repeats) for name in backends}
        workloads = next(iter(results.values())).keys()
        header = f"{'workload':<14}" + "".join(f"{n:>14}" for n in backends)
        if len(backends) == 2:
            header += f"{'speedup':>10}"
        print(header)
        for w in workloads:
            line = f"{w:<14}" + "".join(f"{results[n][w] * 1e6:>12.1f}us" for n in backends)
            if len(backends) == 2:
                a, b = (results[n][w] for n in backends)
                line += f"{a / b:>9.1f}x"
            print(line)


if __name__ == "__main__":
    main()
