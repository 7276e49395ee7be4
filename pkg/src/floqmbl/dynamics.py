"""Heisenberg-picture evolution with a running time average.

One step takes O(jT) -> O((j+1)T) = P^dagger O(jT) P for the period
unitary P, realized by conjugating with each gate of the period in
reverse application order.  The unscaled accumulator S_j = sum_{m<=j}
O(mT) is kept and divided only on read, so recording is cheap and free
of repeated-division drift.  The recorded quantity is the squared size
Tr((S_j / j)^2) / 2**L.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import CircuitConfig, FloquetPeriod
from .operators import DenseOperator, conjugate_operator, operator_size_sq


def standard_record_schedule(n_steps: int) -> tuple[int, ...]:
    """Steps 1..30, powers of two, and the final step."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    steps = set(range(1, min(30, n_steps) + 1))
    p = 1
    while p <= n_steps:
        steps.add(p)
        p *= 2
    steps.add(n_steps)
    return tuple(sorted(steps))


@dataclass
class NormSeries:
    """Squared sizes of the time-averaged operator at recorded steps."""

    steps: list[int]
    sizes: list[float]
    op_label: str
    config: CircuitConfig
    _index: dict[int, int] = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {n: k for k, n in enumerate(self.steps)}

    @property
    def phi(self) -> float:
        """Shared disorder phase of the generating config."""
        return self.config.theta.phase

    def size_at(self, n: int) -> float:
        try:
            return self.sizes[self._index[n]]
        except KeyError:
            raise KeyError(f"step {n} was not recorded") from None

    def window(self, n_max: int, n_min: int = 1) -> tuple[list[int], list[float]]:
        """All recorded (steps, sizes) with n_min <= step <= n_max."""
        pairs = [(n, s) for n, s in zip(self.steps, self.sizes) if n_min <= n <= n_max]
        return [n for n, _ in pairs], [s for _, s in pairs]

    def to_csv(self) -> str:
        lines = ["step,size_sq"]
        for n, s in zip(self.steps, self.sizes):
            lines.append(f"{n},{s:.17g}")
        return "\n".join(lines) + "\n"


def time_averaged_operator(
    op: DenseOperator, period: FloquetPeriod, n_steps: int
) -> DenseOperator:
    """(1/n) sum_{j=1..n} O(jT) as a dense operator; the seed is not mutated."""
    if op.num_qubits != period.num_qubits:
        raise ValueError(
            f"operator has L={op.num_qubits} but period has L={period.num_qubits}"
        )
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    reversed_gates = tuple(reversed(period.gates))
    current = op.copy()
    accumulator = DenseOperator.zero(op.num_qubits)
    for _ in range(n_steps):
        for gate in reversed_gates:
            conjugate_operator(current, gate)
        accumulator.add_(current)
    accumulator.entries /= n_steps
    return accumulator


def running_average_size(accumulator: DenseOperator, j: int) -> float:
    """Size of accumulator/j without mutating the accumulator."""
    if j < 1:
        raise ValueError(f"step count must be >= 1, got {j}")
    return operator_size_sq(accumulator) / (j * j)


def evolve_heisenberg(
    op: DenseOperator,
    period: FloquetPeriod,
    n_steps: int,
    record_at=None,
    op_label: str = "",
) -> NormSeries:
    """Evolve a seed operator for n_steps periods, recording average sizes.

    The seed is not mutated.  ``record_at`` must be sorted, strictly
    increasing, and bounded by n_steps; it defaults to the standard
    schedule.
    """
    if op.num_qubits != period.num_qubits:
        raise ValueError(
            f"operator has L={op.num_qubits} but period has L={period.num_qubits}"
        )
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if record_at is None:
        record_at = standard_record_schedule(n_steps)
    record_at = [int(n) for n in record_at]
    if not record_at:
        raise ValueError("record_at must contain at least one step")
    if any(b <= a for a, b in zip(record_at, record_at[1:])):
        raise ValueError("record_at must be strictly increasing")
    if record_at[0] < 1 or record_at[-1] > n_steps:
        raise ValueError(f"record_at must lie within 1..{n_steps}")

    record_set = set(record_at)
    reversed_gates = tuple(reversed(period.gates))
    current = op.copy()
    accumulator = DenseOperator.zero(op.num_qubits)
    sizes: list[float] = []
    for j in range(1, n_steps + 1):
        for gate in reversed_gates:
            conjugate_operator(current, gate)
        accumulator.add_(current)
        if j in record_set:
            sizes.append(running_average_size(accumulator, j))
    return NormSeries(list(record_at), sizes, op_label, period.config)
