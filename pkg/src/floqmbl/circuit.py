"""One Floquet driving period with quasi-periodically modulated parameters.

A period is three layers on an open chain: single-qubit phase rotations
exp(-i theta_i Z), then XX+ZZ coupling gates on even bonds, then on odd
bonds.  Site/bond parameters follow x_i = x0 + x1*cos(2*pi*k*i + phi)
with k the inverse golden ratio by default, incommensurate with the
lattice, so the chain is quasi-periodically disordered rather than
translationally invariant.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .states import Gate

INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QuasiPeriodicParams:
    """Parameters of the site-dependent modulation base + amplitude*cos(2 pi k i + phase)."""

    base: float
    amplitude: float = 0.0
    wavenumber: float = INV_GOLDEN
    phase: float = 0.0

    def __post_init__(self):
        for name in ("base", "amplitude", "wavenumber", "phase"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if not 0.0 <= self.phase < TWO_PI:
            raise ValueError(f"phase must lie in [0, 2*pi), got {self.phase}")


def quasi_periodic_value(params: QuasiPeriodicParams, i: int) -> float:
    """Modulated value at site or bond index i >= 0."""
    if i < 0:
        raise ValueError(f"site index must be >= 0, got {i}")
    return params.base + params.amplitude * math.cos(
        TWO_PI * params.wavenumber * i + params.phase
    )


@dataclass(frozen=True)
class CircuitConfig:
    """Full parameter set for one driving period on an open chain."""

    num_qubits: int
    theta: QuasiPeriodicParams
    t: QuasiPeriodicParams
    jz: float = 0.1

    def __post_init__(self):
        if self.num_qubits < 2:
            raise ValueError(f"num_qubits must be >= 2, got {self.num_qubits}")
        if not math.isfinite(self.jz):
            raise ValueError(f"jz must be finite, got {self.jz}")

    def with_phase(self, phi: float) -> "CircuitConfig":
        """Same parameters with the shared disorder phase set to phi."""
        return dataclasses.replace(
            self,
            theta=dataclasses.replace(self.theta, phase=phi),
            t=dataclasses.replace(self.t, phase=phi),
        )


@dataclass(frozen=True)
class FloquetPeriod:
    """Gate list of one driving period, in application order."""

    num_qubits: int
    gates: tuple[Gate, ...]
    config: CircuitConfig


def rotation_gate(angle: float, site: int) -> Gate:
    """exp(-i angle Z) on one site."""
    m = np.array(
        [[np.exp(-1j * angle), 0.0], [0.0, np.exp(1j * angle)]], dtype=np.complex128
    )
    return Gate(m, (site,), f"rot({angle:.6g})@{site}")


def coupling_gate(xx_angle: float, zz_angle: float, site_a: int, site_b: int) -> Gate:
    """exp(-i (xx_angle XX + zz_angle ZZ)) on a bond.

    XX and ZZ commute, so the exponential splits into
    (cos(a) I - i sin(a) XX) . diag(e^{-ib}, e^{ib}, e^{ib}, e^{-ib}).
    """
    c = math.cos(xx_angle)
    s = math.sin(xx_angle)
    zm = np.exp(-1j * zz_angle)
    zp = np.exp(1j * zz_angle)
    m = np.array(
        [
            [c * zm, 0.0, 0.0, -1j * s * zm],
            [0.0, c * zp, -1j * s * zp, 0.0],
            [0.0, -1j * s * zp, c * zp, 0.0],
            [-1j * s * zm, 0.0, 0.0, c * zm],
        ],
        dtype=np.complex128,
    )
    return Gate(m, (site_a, site_b), f"xxzz({xx_angle:.6g},{zz_angle:.6g})@{site_a},{site_b}")


def even_bonds(num_qubits: int) -> list[int]:
    """Left sites of the even-bond layer: (0,1), (2,3), ..."""
    return list(range(0, num_qubits - 1, 2))


def odd_bonds(num_qubits: int) -> list[int]:
    """Left sites of the odd-bond layer: (1,2), (3,4), ..."""
    return list(range(1, num_qubits - 1, 2))


def build_period(cfg: CircuitConfig) -> FloquetPeriod:
    """Construct the three-layer period for a config.

    Layer 1: exp(-i theta_i Z) on every site, ascending.
    Layer 2: exp(-i (t_i XX + jz ZZ)) on even bonds (i, i+1), ascending.
    Layer 3: the same on odd bonds, ascending.
    """
    L = cfg.num_qubits
    gates: list[Gate] = []
    for site in range(L):
        gates.append(rotation_gate(quasi_periodic_value(cfg.theta, site), site))
    for i in even_bonds(L) + odd_bonds(L):
        gates.append(coupling_gate(quasi_periodic_value(cfg.t, i), cfg.jz, i, i + 1))
    return FloquetPeriod(L, tuple(gates), cfg)
