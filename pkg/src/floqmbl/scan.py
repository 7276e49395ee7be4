"""Parameter-space scans across the phase boundary.

A trajectory is a straight segment in the (t0, theta0) plane; every grid
point is evolved for n_long periods at several disorder phases phi, the
tail of the short window (steps ~n_short/4 .. n_short by default) is fit
to a * n**-b + c, and the fitted saturation c extrapolates the long-time
size from near-term-depth data.  The first few averaged steps are
excluded from the fit because they are transient-dominated (the j=1 term
always has size ~1); including them lets a near-flat power law absorb
the saturation and drives c to zero on slowly relaxing circuits.

The fit is a deterministic grid scan over the decay exponent: for each
candidate b the amplitude and offset solve a linear least-squares problem
(offset clamped at zero when the unconstrained solution goes negative),
and the coarse 200-point log grid is sharpened by local grid refinement
around its minimizer.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import INV_GOLDEN, CircuitConfig, QuasiPeriodicParams, build_period
from .dynamics import NormSeries, evolve_heisenberg, standard_record_schedule
from .operators import PauliString, pauli_to_dense

B_GRID_MIN = 0.05
B_GRID_MAX = 3.0
B_GRID_POINTS = 200
# local refinement of the coarse minimizer; width shrinks ~10x per round
B_REFINE_ROUNDS = 8
B_REFINE_POINTS = 21

DEFAULT_START = (0.2, 0.8)
DEFAULT_END = (0.8, 0.2)
DEFAULT_NUM_POINTS = 13
DEFAULT_AMPLITUDE_RATIO = 0.2
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FitResult:
    """Power-law fit sizes ~ a * n**-b + c."""

    a: float
    b: float
    c: float
    residual: float

    def model(self, steps) -> np.ndarray:
        steps = np.asarray(steps, dtype=np.float64)
        return self.a * steps ** (-self.b) + self.c


def _solve_at_b(steps: np.ndarray, sizes: np.ndarray, b: float):
    """Least-squares (a, c) at fixed exponent, with c clamped to >= 0."""
    x = steps ** (-b)
    design = np.column_stack([x, np.ones_like(x)])
    (a, c), *_ = np.linalg.lstsq(design, sizes, rcond=None)
    if c < 0.0:
        c = 0.0
        a = float(np.dot(x, sizes) / np.dot(x, x))
    resid = float(np.sqrt(np.mean((a * x + c - sizes) ** 2)))
    return float(a), float(c), resid


def _scan_b(steps, sizes, b_values):
    best = None
    for b in b_values:
        a, c, resid = _solve_at_b(steps, sizes, b)
        if best is None or resid < best[3]:
            best = (a, float(b), c, resid)
    return best


def fit_power_law(steps, sizes) -> FitResult:
    """Fit sizes ~ a * n**-b + c over a deterministic exponent grid."""
    steps = np.asarray(steps, dtype=np.float64)
    sizes = np.asarray(sizes, dtype=np.float64)
    if steps.ndim != 1 or steps.shape != sizes.shape:
        raise ValueError("steps and sizes must be 1-d arrays of equal length")
    if steps.size < 4:
        raise ValueError(f"need at least 4 points to fit, got {steps.size}")
    if np.any(steps < 1) or np.any(np.diff(steps) <= 0):
        raise ValueError("steps must be strictly increasing and >= 1")
    if np.any(sizes < 0):
        raise ValueError("sizes must be nonnegative")

    if np.all(sizes == sizes[0]):
        return FitResult(0.0, B_GRID_MIN, float(sizes[0]), 0.0)

    grid = np.geomspace(B_GRID_MIN, B_GRID_MAX, B_GRID_POINTS)
    a, b, c, resid = _scan_b(steps, sizes, grid)
    # refine around the coarse minimizer; keep within the stated exponent range
    idx = int(np.argmin(np.abs(grid - b)))
    lo = grid[max(idx - 1, 0)]
    hi = grid[min(idx + 1, grid.size - 1)]
    for _ in range(B_REFINE_ROUNDS):
        local = np.geomspace(lo, hi, B_REFINE_POINTS)
        a, b, c, resid = _scan_b(steps, sizes, local)
        j = int(np.argmin(np.abs(local - b)))
        lo = local[max(j - 1, 0)]
        hi = local[min(j + 1, local.size - 1)]
    return FitResult(a, b, c, resid)


@dataclass(frozen=True)
class ScanTrajectory:
    """Evenly spaced points on a segment in the (t0, theta0) plane."""

    start: tuple[float, float] = DEFAULT_START
    end: tuple[float, float] = DEFAULT_END
    num_points: int = DEFAULT_NUM_POINTS
    num_qubits: int = 8
    jz: float = 0.1
    amplitude_ratio: float = DEFAULT_AMPLITUDE_RATIO
    wavenumber: float = INV_GOLDEN

    def __post_init__(self):
        if self.num_points < 2:
            raise ValueError(f"num_points must be >= 2, got {self.num_points}")
        object.__setattr__(self, "start", (float(self.start[0]), float(self.start[1])))
        object.__setattr__(self, "end", (float(self.end[0]), float(self.end[1])))

    def points(self) -> list[tuple[float, float]]:
        (t0, th0), (t1, th1) = self.start, self.end
        out = []
        for k in range(self.num_points):
            frac = k / (self.num_points - 1)
            out.append(
                ((1.0 - frac) * t0 + frac * t1, (1.0 - frac) * th0 + frac * th1)
            )
        return out

    def config_at(self, t_base: float, theta_base: float, phi: float) -> CircuitConfig:
        return CircuitConfig(
            num_qubits=self.num_qubits,
            theta=QuasiPeriodicParams(
                theta_base, self.amplitude_ratio * theta_base, self.wavenumber, phi
            ),
            t=QuasiPeriodicParams(
                t_base, self.amplitude_ratio * t_base, self.wavenumber, phi
            ),
            jz=self.jz,
        )


@dataclass
class RealizationRecord:
    """One disorder phase: its series and short-window fit."""

    phi: float
    series: NormSeries
    fit: FitResult


@dataclass
class ScanRecord:
    """Disorder-averaged sizes and extrapolations at one grid point."""

    t: float
    theta: float
    size_long: float
    size_short: float
    extrapolated_c: float
    realizations: list[RealizationRecord]


def default_order_parameter(num_qubits: int) -> PauliString:
    """sigma^x sigma^x on the two central sites."""
    mid = num_qubits // 2
    return PauliString(((mid - 1, "X"), (mid, "X")))


def sample_phi(seed: int, realization: int) -> float:
    """Disorder phase for one realization, shared across grid points."""
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(realization,))
    )
    return float(rng.uniform(0.0, TWO_PI))


def _scan_record_schedule(n_long: int, n_short: int) -> tuple[int, ...]:
    full = set(standard_record_schedule(n_long))
    full.update(range(1, n_short + 1))
    full.add(n_short)
    return tuple(sorted(full))


def default_fit_window_start(n_short: int) -> int:
    """First averaged step entering the extrapolation fit."""
    return min(max(1, -(-n_short // 4)), n_short - 3)


def _realization_task(args) -> tuple[int, int, RealizationRecord]:
    (traj, t_base, theta_base, point_idx, realization, seed, operator,
     n_long, n_short, fit_start, record_at) = args
    phi = sample_phi(seed, realization)
    cfg = traj.config_at(t_base, theta_base, phi)
    period = build_period(cfg)
    dense = pauli_to_dense(operator, traj.num_qubits)
    series = evolve_heisenberg(
        dense, period, n_long, record_at=record_at, op_label=operator.label
    )
    fit_steps, fit_sizes = series.window(n_short, n_min=fit_start)
    fit = fit_power_law(fit_steps, fit_sizes)
    return point_idx, realization, RealizationRecord(phi, series, fit)


def run_scan(
    traj: ScanTrajectory,
    n_long: int = 1000,
    n_short: int = 30,
    num_phi: int = 8,
    seed: int = 1,
    operator: PauliString | None = None,
    fit_window_start: int | None = None,
    threads: int = 1,
) -> list[ScanRecord]:
    """Evolve every (grid point, disorder phase) pair and aggregate.

    Work items are independent; phi depends only on (seed, realization
    index), so any sub-trajectory of a scan reproduces the same records.
    """
    if n_short > n_long:
        raise ValueError(f"n_short={n_short} exceeds n_long={n_long}")
    if n_short < 4:
        raise ValueError("n_short must be >= 4 to support the power-law fit")
    if num_phi < 1:
        raise ValueError(f"num_phi must be >= 1, got {num_phi}")
    if operator is None:
        operator = default_order_parameter(traj.num_qubits)
    if fit_window_start is None:
        fit_window_start = default_fit_window_start(n_short)
    if not 1 <= fit_window_start <= n_short - 3:
        raise ValueError(
            f"fit_window_start={fit_window_start} leaves fewer than 4 fit points"
        )

    record_at = _scan_record_schedule(n_long, n_short)
    tasks = [
        (traj, t, th, pi, r, seed, operator, n_long, n_short,
         fit_window_start, record_at)
        for pi, (t, th) in enumerate(traj.points())
        for r in range(num_phi)
    ]
    results: dict[tuple[int, int], RealizationRecord] = {}
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for pi, r, rec in pool.map(_realization_task, tasks, chunksize=1):
                results[(pi, r)] = rec
    else:
        for task in tasks:
            pi, r, rec = _realization_task(task)
            results[(pi, r)] = rec

    records = []
    for pi, (t, th) in enumerate(traj.points()):
        reals = [results[(pi, r)] for r in range(num_phi)]
        size_long = math.fsum(r.series.size_at(n_long) for r in reals) / num_phi
        size_short = math.fsum(r.series.size_at(n_short) for r in reals) / num_phi
        extrapolated = math.fsum(r.fit.c for r in reals) / num_phi
        records.append(ScanRecord(t, th, size_long, size_short, extrapolated, reals))
    return records


def scan_csv(records: list[ScanRecord], n_long: int, n_short: int) -> str:
    """Aggregate CSV; column names carry the actual step counts."""
    lines = [f"t,theta,size_n{n_long},size_n{n_short},extrapolated_c,n_realizations"]
    for rec in records:
        lines.append(
            f"{rec.t:.17g},{rec.theta:.17g},{rec.size_long:.17g},"
            f"{rec.size_short:.17g},{rec.extrapolated_c:.17g},{len(rec.realizations)}"
        )
    return "\n".join(lines) + "\n"


def realizations_csv(records: list[ScanRecord]) -> str:
    """Per-realization series, one row per recorded step."""
    lines = ["t,theta,phi,step,size_sq"]
    for rec in records:
        for real in rec.realizations:
            for step, size in zip(real.series.steps, real.series.sizes):
                lines.append(
                    f"{rec.t:.17g},{rec.theta:.17g},{real.phi:.17g},{step},{size:.17g}"
                )
    return "\n".join(lines) + "\n"
