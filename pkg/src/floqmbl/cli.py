"""Command-line entry point.

Experiments are addressed by a strict JSON config (unknown keys are
rejected); every run writes its result files plus a ``manifest.json``
whose ``config`` block is the fully resolved configuration, so re-running
a manifest reproduces the results bit for bit.

    floqmbl --config cfg.json [--output-dir DIR] [--seed N] [--threads K]

Exit codes: 0 success, 2 config parse/validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

from . import __version__, kernels
from .circuit import INV_GOLDEN, CircuitConfig, QuasiPeriodicParams, build_period
from .dynamics import evolve_heisenberg, time_averaged_operator
from .operators import PauliString, operator_size_sq, pauli_to_dense
from .qasm import export_qasm
from .randmeas import (
    EXACT_RHS_MAX_L,
    VARIANT_CROSS_CORRELATION,
    VARIANTS,
    RandomMeasConfig,
    estimate_time_averaged_size,
    exact_rhs_small_L,
)
from .scan import (
    DEFAULT_AMPLITUDE_RATIO,
    DEFAULT_END,
    DEFAULT_NUM_POINTS,
    DEFAULT_START,
    ScanTrajectory,
    default_order_parameter,
    realizations_csv,
    run_scan,
    scan_csv,
)

MODES = ("dynamics", "scan", "randmeas", "validate", "export-qasm")

THREADS_ENV_VAR = "FLOQMBL_THREADS"


class ConfigError(Exception):
    """Invalid configuration; maps to exit code 2."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _check_keys(obj: dict, allowed, path: str):
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        _fail(path, f"unknown key(s) {', '.join(repr(k) for k in unknown)}")


def _get_number(obj, key, path, default=None, required=False, nullable=False,
                integer=False, minimum=None):
    if key not in obj:
        if required:
            _fail(path, f"missing required field '{key}'")
        value = default
    else:
        value = obj[key]
    if value is None:
        if not nullable:
            _fail(f"{path}.{key}", "must not be null")
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"{path}.{key}", f"expected a number, got {value!r}")
    if integer and int(value) != value:
        _fail(f"{path}.{key}", f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(f"{path}.{key}", f"must be >= {minimum}, got {value}")
    return int(value) if integer else float(value)


def _get_str(obj, key, path, default=None, choices=None, required=False):
    if key not in obj:
        if required:
            _fail(path, f"missing required field '{key}'")
        return default
    value = obj[key]
    if not isinstance(value, str):
        _fail(f"{path}.{key}", f"expected a string, got {value!r}")
    if choices and value not in choices:
        _fail(f"{path}.{key}", f"must be one of {choices}, got {value!r}")
    return value


def _get_operator(obj, key, path):
    """[[site, axis], ...] or null for the default central-bond order parameter."""
    value = obj.get(key)
    if value is None:
        return None
    if not isinstance(value, list) or not all(
        isinstance(f, list) and len(f) == 2 for f in value
    ):
        _fail(f"{path}.{key}", "expected a list of [site, axis] pairs")
    try:
        return [[int(s), str(a).upper()] for s, a in value]
    except (TypeError, ValueError):
        _fail(f"{path}.{key}", f"malformed operator {value!r}")


def _get_pair(obj, key, path, default):
    value = obj.get(key, list(default))
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        _fail(f"{path}.{key}", f"expected a [t, theta] pair of numbers, got {value!r}")
    return [float(value[0]), float(value[1])]


def _resolve_circuit(raw: dict) -> dict:
    if "circuit" not in raw:
        raise ConfigError("config: missing required field 'circuit'")
    c = raw["circuit"]
    if not isinstance(c, dict):
        raise ConfigError("config.circuit: expected an object")
    _check_keys(
        c,
        ("num_qubits", "theta_base", "theta_amplitude", "t_base", "t_amplitude",
         "jz", "wavenumber", "phi"),
        "config.circuit",
    )
    path = "config.circuit"
    num_qubits = _get_number(c, "num_qubits", path, required=True, integer=True, minimum=2)
    theta_base = _get_number(c, "theta_base", path, nullable=True)
    t_base = _get_number(c, "t_base", path, nullable=True)
    theta_amplitude = _get_number(c, "theta_amplitude", path, nullable=True)
    t_amplitude = _get_number(c, "t_amplitude", path, nullable=True)
    if theta_amplitude is None and theta_base is not None:
        theta_amplitude = DEFAULT_AMPLITUDE_RATIO * theta_base
    if t_amplitude is None and t_base is not None:
        t_amplitude = DEFAULT_AMPLITUDE_RATIO * t_base
    wavenumber = _get_number(c, "wavenumber", path, nullable=True)
    if wavenumber is None:
        wavenumber = INV_GOLDEN
    phi = _get_number(c, "phi", path, default=0.0)
    jz = _get_number(c, "jz", path, default=0.1)
    return {
        "num_qubits": num_qubits,
        "theta_base": theta_base,
        "theta_amplitude": theta_amplitude,
        "t_base": t_base,
        "t_amplitude": t_amplitude,
        "jz": jz,
        "wavenumber": wavenumber,
        "phi": phi,
    }


def _block_key(mode: str) -> str:
    return mode.replace("-", "_")


def _resolve_mode_block(raw: dict, mode: str, num_qubits: int) -> dict:
    key = _block_key(mode)
    block = raw.get(key, {})
    if not isinstance(block, dict):
        raise ConfigError(f"config.{key}: expected an object")
    path = f"config.{key}"
    if mode == "dynamics":
        _check_keys(block, ("operator", "n_steps", "record_at"), path)
        n_steps = _get_number(block, "n_steps", path, default=1000, integer=True, minimum=1)
        record_at = block.get("record_at")
        if record_at is not None:
            if not isinstance(record_at, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in record_at
            ):
                _fail(f"{path}.record_at", "expected a list of integers or null")
            if not record_at or any(b <= a for a, b in zip(record_at, record_at[1:])):
                _fail(f"{path}.record_at", "must be non-empty and strictly increasing")
            if record_at[0] < 1 or record_at[-1] > n_steps:
                _fail(f"{path}.record_at", f"steps must lie within 1..{n_steps}")
        return {
            "operator": _get_operator(block, "operator", path),
            "n_steps": n_steps,
            "record_at": record_at,
        }
    if mode == "scan":
        _check_keys(
            block,
            ("start", "end", "num_points", "n_long", "n_short", "num_phi",
             "operator", "amplitude_ratio"),
            path,
        )
        return {
            "start": _get_pair(block, "start", path, DEFAULT_START),
            "end": _get_pair(block, "end", path, DEFAULT_END),
            "num_points": _get_number(block, "num_points", path,
                                      default=DEFAULT_NUM_POINTS, integer=True, minimum=2),
            "n_long": _get_number(block, "n_long", path, default=1000, integer=True, minimum=1),
            "n_short": _get_number(block, "n_short", path, default=30, integer=True, minimum=4),
            "num_phi": _get_number(block, "num_phi", path, default=8, integer=True, minimum=1),
            "operator": _get_operator(block, "operator", path),
            "amplitude_ratio": _get_number(block, "amplitude_ratio", path,
                                           default=DEFAULT_AMPLITUDE_RATIO),
        }
    if mode in ("randmeas", "validate"):
        allowed = ["operator", "flip_sites", "num_unitaries", "n_steps"]
        if mode == "randmeas":
            allowed.append("variant")
        _check_keys(block, allowed, path)
        flip_sites = block.get("flip_sites")
        if flip_sites is None:
            flip_sites = list(range(num_qubits))
        elif not isinstance(flip_sites, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in flip_sites
        ):
            _fail(f"{path}.flip_sites", "expected a list of qubit indices or null")
        resolved = {
            "operator": _get_operator(block, "operator", path),
            "flip_sites": flip_sites,
            "num_unitaries": _get_number(
                block, "num_unitaries", path,
                default=2000 if mode == "validate" else 500, integer=True, minimum=1),
            "n_steps": _get_number(block, "n_steps", path, default=32, integer=True, minimum=1),
        }
        if mode == "randmeas":
            resolved["variant"] = _get_str(
                block, "variant", path,
                default=VARIANT_CROSS_CORRELATION, choices=VARIANTS)
        return resolved
    if mode == "export-qasm":
        _check_keys(block, ("repetitions",), path)
        return {
            "repetitions": _get_number(block, "repetitions", path,
                                       default=1, integer=True, minimum=1),
        }
    raise AssertionError(mode)


def resolve_config(raw: dict) -> dict:
    """Validate a raw config dict and materialize every default."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    if "config" in raw and "mode" not in raw:
        # a manifest was passed back in; its config block is the config
        raw = raw["config"]
        if not isinstance(raw, dict):
            raise ConfigError("config.config: expected an object")
    mode = _get_str(raw, "mode", "config", choices=MODES, required=True)
    allowed = ("mode", "seed", "output_dir", "circuit", _block_key(mode))
    _check_keys(raw, allowed, "config")
    seed = _get_number(raw, "seed", "config", default=1, integer=True, minimum=0)
    output_dir = _get_str(raw, "output_dir", "config", default="out")
    circuit = _resolve_circuit(raw)
    block = _resolve_mode_block(raw, mode, circuit["num_qubits"])
    return {
        "mode": mode,
        "seed": seed,
        "output_dir": output_dir,
        "circuit": circuit,
        _block_key(mode): block,
    }


def _circuit_config(circuit: dict, mode: str) -> CircuitConfig:
    for field in ("theta_base", "t_base"):
        if circuit[field] is None:
            raise ConfigError(
                f"config.circuit.{field} is required for mode '{mode}'"
            )
    try:
        return CircuitConfig(
            num_qubits=circuit["num_qubits"],
            theta=QuasiPeriodicParams(
                circuit["theta_base"], circuit["theta_amplitude"],
                circuit["wavenumber"], circuit["phi"]),
            t=QuasiPeriodicParams(
                circuit["t_base"], circuit["t_amplitude"],
                circuit["wavenumber"], circuit["phi"]),
            jz=circuit["jz"],
        )
    except ValueError as exc:
        raise ConfigError(f"config.circuit: {exc}") from None


def _operator_from_config(spec, num_qubits: int) -> PauliString:
    if spec is None:
        return default_order_parameter(num_qubits)
    try:
        op = PauliString(tuple((s, a) for s, a in spec))
    except ValueError as exc:
        raise ConfigError(f"config operator: {exc}") from None
    if op.factors and op.max_site() >= num_qubits:
        raise ConfigError(
            f"config operator: site {op.max_site()} out of range for "
            f"L={num_qubits}"
        )
    return op


def _write_atomic(path: Path, text: str):
    """Write via a temp file and atomic rename; no partial result files."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _run_dynamics(config: dict, outdir: Path, threads: int) -> list[str]:
    block = config["dynamics"]
    cfg = _circuit_config(config["circuit"], "dynamics")
    operator = _operator_from_config(block["operator"], cfg.num_qubits)
    period = build_period(cfg)
    series = evolve_heisenberg(
        pauli_to_dense(operator, cfg.num_qubits),
        period,
        block["n_steps"],
        record_at=block["record_at"],
        op_label=operator.label,
    )
    _write_atomic(outdir / "norm_series.csv", series.to_csv())
    return ["norm_series.csv"]


def _run_scan(config: dict, outdir: Path, threads: int) -> list[str]:
    block = config["scan"]
    circuit = config["circuit"]
    traj = ScanTrajectory(
        start=tuple(block["start"]),
        end=tuple(block["end"]),
        num_points=block["num_points"],
        num_qubits=circuit["num_qubits"],
        jz=circuit["jz"],
        amplitude_ratio=block["amplitude_ratio"],
        wavenumber=circuit["wavenumber"],
    )
    operator = _operator_from_config(block["operator"], circuit["num_qubits"])
    records = run_scan(
        traj,
        n_long=block["n_long"],
        n_short=block["n_short"],
        num_phi=block["num_phi"],
        seed=config["seed"],
        operator=operator,
        threads=threads,
    )
    _write_atomic(outdir / "scan.csv", scan_csv(records, block["n_long"], block["n_short"]))
    _write_atomic(outdir / "realizations.csv", realizations_csv(records))
    return ["scan.csv", "realizations.csv"]


def _run_randmeas(config: dict, outdir: Path, threads: int) -> list[str]:
    block = config["randmeas"]
    cfg = _circuit_config(config["circuit"], "randmeas")
    operator = _operator_from_config(block["operator"], cfg.num_qubits)
    period = build_period(cfg)
    try:
        meas = RandomMeasConfig(
            num_qubits=cfg.num_qubits,
            flip_sites=tuple(block["flip_sites"]),
            num_unitaries=block["num_unitaries"],
            n_steps=block["n_steps"],
            seed=config["seed"],
            variant=block["variant"],
        )
    except ValueError as exc:
        raise ConfigError(f"config.randmeas: {exc}") from None
    result = estimate_time_averaged_size(operator, period, meas, threads=threads)
    _write_atomic(outdir / "estimator.json", _json_text(result.to_json_record()))
    return ["estimator.json"]


def _run_validate(config: dict, outdir: Path, threads: int) -> list[str]:
    block = config["validate"]
    cfg = _circuit_config(config["circuit"], "validate")
    L = cfg.num_qubits
    if L > EXACT_RHS_MAX_L:
        raise ConfigError(
            f"config.circuit.num_qubits: validate mode needs L <= {EXACT_RHS_MAX_L} "
            f"for the doubled-space oracle, got {L}"
        )
    operator = _operator_from_config(block["operator"], L)
    period = build_period(cfg)
    flip_sites = tuple(block["flip_sites"])
    m = len(flip_sites)
    n_steps = block["n_steps"]
    try:
        RandomMeasConfig(
            num_qubits=L, flip_sites=flip_sites,
            num_unitaries=block["num_unitaries"], n_steps=n_steps,
            seed=config["seed"],
        )
    except ValueError as exc:
        raise ConfigError(f"config.validate: {exc}") from None

    averaged = time_averaged_operator(pauli_to_dense(operator, L), period, n_steps)
    exact_trace = operator_size_sq(averaged)
    rhs = exact_rhs_small_L(averaged, m, flip_sites)

    variants = {}
    validated = None
    for variant in VARIANTS:
        try:
            meas = RandomMeasConfig(
                num_qubits=L,
                flip_sites=flip_sites,
                num_unitaries=block["num_unitaries"],
                n_steps=n_steps,
                seed=config["seed"],
                variant=variant,
            )
        except ValueError as exc:
            raise ConfigError(f"config.validate: {exc}") from None
        result = estimate_time_averaged_size(operator, period, meas, threads=threads)
        if result.std_error > 0:
            deviation = (result.estimate - exact_trace) / result.std_error
        else:
            deviation = math.inf if result.estimate != exact_trace else 0.0
        variants[variant] = {
            "estimate": result.estimate,
            "std_error": result.std_error,
            "calibration": result.calibration,
            "deviation_sigmas_vs_exact": deviation,
        }
        if abs(deviation) <= 3.0 and (
            validated is None or variant == VARIANT_CROSS_CORRELATION
        ):
            validated = variant

    report = {
        "L": L,
        "m": m,
        "flip_sites": list(flip_sites),
        "operator": operator.label,
        "n_steps": n_steps,
        "num_unitaries": block["num_unitaries"],
        "seed": config["seed"],
        "exact_trace_size": exact_trace,
        "exact_doubled_space_rhs": rhs,
        "protocol_mean_from_rhs": (2.0**m) * rhs,
        "variants": variants,
        "validated_variant": validated,
    }
    _write_atomic(outdir / "validation_report.json", _json_text(report))
    return ["validation_report.json"]


def _run_export_qasm(config: dict, outdir: Path, threads: int) -> list[str]:
    block = config["export_qasm"]
    cfg = _circuit_config(config["circuit"], "export-qasm")
    period = build_period(cfg)
    _write_atomic(outdir / "circuit.qasm", export_qasm(period, block["repetitions"]))
    return ["circuit.qasm"]


_MODE_RUNNERS = {
    "dynamics": _run_dynamics,
    "scan": _run_scan,
    "randmeas": _run_randmeas,
    "validate": _run_validate,
    "export-qasm": _run_export_qasm,
}


def run(config_path: str, output_dir: str | None = None, seed: int | None = None,
        threads: int | None = None) -> int:
    """Execute a config file; returns the process exit status."""
    try:
        text = Path(config_path).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        print(
            f"error: config parse error in {config_path} at line {exc.lineno} "
            f"column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return 2

    try:
        config = resolve_config(raw)
        if seed is not None:
            config["seed"] = int(seed)
        if output_dir is not None:
            config["output_dir"] = str(output_dir)
        if threads is None:
            threads = int(os.environ.get(THREADS_ENV_VAR, "1"))
        if threads < 1:
            raise ConfigError("threads must be >= 1")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    outdir = Path(config["output_dir"])
    started = time.monotonic()
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        outputs = _MODE_RUNNERS[config["mode"]](config, outdir, threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 3
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    manifest = {
        "config": config,
        "library_version": __version__,
        "kernel_backend": kernels.backend,
        "threads": threads,
        "timing_seconds": time.monotonic() - started,
        "outputs": outputs,
    }
    _write_atomic(outdir / "manifest.json", _json_text(manifest))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="floqmbl",
        description="Floquet circuit simulation: order-parameter dynamics, "
        "phase scans, and randomized-measurement estimation.",
    )
    parser.add_argument("--config", required=True, help="path to a JSON config file")
    parser.add_argument("--output-dir", default=None, help="override config output_dir")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument(
        "--threads", type=int, default=None,
        help=f"worker processes (default: ${THREADS_ENV_VAR} or 1); "
        "1 forces fully serial execution",
    )
    args = parser.parse_args(argv)
    return run(args.config, args.output_dir, args.seed, args.threads)


if __name__ == "__main__":
    sys.exit(main())
