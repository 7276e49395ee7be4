"""Floquet spin-chain circuits with quasi-periodic disorder.

Simulates periodically driven Ising-like qubit chains whose parameters
are modulated incommensurately with the lattice, evolves order-parameter
operators in the Heisenberg picture with running time averages, and
estimates the resulting operator sizes both exactly and through a
locally-randomized measurement protocol.
"""

__version__ = "0.1.0"

from .circuit import (
    INV_GOLDEN,
    CircuitConfig,
    FloquetPeriod,
    QuasiPeriodicParams,
    build_period,
    quasi_periodic_value,
)
from .dynamics import (
    NormSeries,
    evolve_heisenberg,
    running_average_size,
    standard_record_schedule,
    time_averaged_operator,
)
from .operators import (
    DenseOperator,
    PauliString,
    conjugate_operator,
    expectation,
    operator_size_sq,
    pauli_to_dense,
)
from .qasm import export_qasm, parse_qasm
from .randmeas import (
    EstimatorResult,
    RandomMeasConfig,
    ensemble_member,
    estimate_time_averaged_size,
    exact_rhs_small_L,
    exact_time_averaged_size,
    sample_local_random_state,
)
from .scan import (
    FitResult,
    RealizationRecord,
    ScanRecord,
    ScanTrajectory,
    default_order_parameter,
    fit_power_law,
    run_scan,
)
from .states import Gate, StateVector, apply_circuit, apply_gate

__all__ = [
    "__version__",
    "INV_GOLDEN",
    "CircuitConfig",
    "DenseOperator",
    "EstimatorResult",
    "FitResult",
    "FloquetPeriod",
    "Gate",
    "NormSeries",
    "PauliString",
    "QuasiPeriodicParams",
    "RandomMeasConfig",
    "RealizationRecord",
    "ScanRecord",
    "ScanTrajectory",
    "StateVector",
    "apply_circuit",
    "apply_gate",
    "build_period",
    "conjugate_operator",
    "default_order_parameter",
    "ensemble_member",
    "estimate_time_averaged_size",
    "evolve_heisenberg",
    "exact_rhs_small_L",
    "exact_time_averaged_size",
    "expectation",
    "export_qasm",
    "fit_power_law",
    "operator_size_sq",
    "parse_qasm",
    "pauli_to_dense",
    "quasi_periodic_value",
    "run_scan",
    "running_average_size",
    "sample_local_random_state",
    "standard_record_schedule",
    "time_averaged_operator",
]
