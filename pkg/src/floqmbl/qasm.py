"""OpenQASM 3 export of Floquet periods, plus a reader for the emitted subset.

Gate translation (all exact, no global-phase residue):
  exp(-i a Z)          -> rz(2a)
  exp(-i b ZZ) on (i,j) -> cx i,j ; rz(2b) j ; cx i,j
  exp(-i a XX) on (i,j) -> h i ; h j ; cx i,j ; rz(2a) j ; cx i,j ; h i ; h j
A bond gate exp(-i(a XX + b ZZ)) splits into the commuting ZZ and XX
sequences, ZZ first.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .circuit import FloquetPeriod, even_bonds, odd_bonds, quasi_periodic_value
from .states import Gate

_SQRT1_2 = 1.0 / math.sqrt(2.0)

HADAMARD = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=np.complex128)

# cx with the control on gate bit 0 (our targets are (control, target))
CX_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=np.complex128
)


def _rz_matrix(lam: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * lam), 0.0], [0.0, np.exp(0.5j * lam)]], dtype=np.complex128
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def export_qasm(period: FloquetPeriod, repetitions: int = 1) -> str:
    """OpenQASM 3 program applying the period ``repetitions`` times."""
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    cfg = period.config
    L = period.num_qubits
    lines = [
        "OPENQASM 3.0;",
        'include "stdgates.inc";',
        f"qubit[{L}] q;",
    ]
    body: list[str] = []
    for site in range(L):
        theta = quasi_periodic_value(cfg.theta, site)
        body.append(f"rz({_fmt(2.0 * theta)}) q[{site}];")
    for i in even_bonds(L) + odd_bonds(L):
        t = quasi_periodic_value(cfg.t, i)
        j = i + 1
        # exp(-i jz ZZ)
        body.append(f"cx q[{i}], q[{j}];")
        body.append(f"rz({_fmt(2.0 * cfg.jz)}) q[{j}];")
        body.append(f"cx q[{i}], q[{j}];")
        # exp(-i t XX)
        body.append(f"h q[{i}];")
        body.append(f"h q[{j}];")
        body.append(f"cx q[{i}], q[{j}];")
        body.append(f"rz({_fmt(2.0 * t)}) q[{j}];")
        body.append(f"cx q[{i}], q[{j}];")
        body.append(f"h q[{i}];")
        body.append(f"h q[{j}];")
    for _ in range(repetitions):
        lines.extend(body)
    return "\n".join(lines) + "\n"


_QUBIT_RE = re.compile(r"^qubit\[(\d+)\]\s+q;$")
_RZ_RE = re.compile(r"^rz\(([^)]+)\)\s+q\[(\d+)\];$")
_H_RE = re.compile(r"^h\s+q\[(\d+)\];$")
_CX_RE = re.compile(r"^cx\s+q\[(\d+)\],\s*q\[(\d+)\];$")


def parse_qasm(text: str) -> tuple[int, list[Gate]]:
    """Read back a program emitted by export_qasm (rz/h/cx subset only)."""
    num_qubits = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//")[0].strip()
        if not line or line.startswith("OPENQASM") or line.startswith("include"):
            continue
        m = _QUBIT_RE.match(line)
        if m:
            num_qubits = int(m.group(1))
            continue
        m = _RZ_RE.match(line)
        if m:
            gates.append(Gate(_rz_matrix(float(m.group(1))), (int(m.group(2)),), "rz"))
            continue
        m = _H_RE.match(line)
        if m:
            gates.append(Gate(HADAMARD, (int(m.group(1)),), "h"))
            continue
        m = _CX_RE.match(line)
        if m:
            gates.append(Gate(CX_MATRIX, (int(m.group(1)), int(m.group(2))), "cx"))
            continue
        raise ValueError(f"unsupported QASM statement on line {lineno}: {raw!r}")
    if num_qubits is None:
        raise ValueError("no qubit register declaration found")
    return num_qubits, gates
