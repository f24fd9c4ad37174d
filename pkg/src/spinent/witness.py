"""Macroscopic thermal entanglement witness for the XY chain.

Maps measurable thermodynamic quantities, the internal energy U and total
magnetization M of an N-site chain in field h, onto the same entanglement
indicator that governs the microscopic solution:

    witness(U, M, h) = ((U + M h)/(N J) + h/(2J) + sqrt(2)/2)^2 - (M/N)^2 - 1/4 .

A negative value certifies pairwise nearest-neighbor entanglement in the
thermal state.  At zero field the condition reduces to the energy criterion
|U|/(N J) > (sqrt(2)-1)/2, which is strictly wider than the older
|U|/(N J) > 1/4 bound.

Energy convention: U here is the energy of the band Hamiltonian
sum_k (J cos k - h) n_k, i.e. the Zeeman term enters as -h * n per site.
A spin-chain energy measured with the Zeeman term -h * S^z carries an extra
constant and equals U + N h / 2; use :func:`spin_energy_to_band` to convert.
(The two conventions coincide at h = 0.)  M = sum_i <S^z_i> is positive
along the field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .xy_chain import XYChainParams, XYPointResult

__all__ = [
    "MacroObservables",
    "thermal_witness",
    "zero_field_energy_criterion",
    "spin_energy_to_band",
    "macro_observables_from_xy",
]

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class MacroObservables:
    """Extensive internal energy u and magnetization m of an n_sites chain."""

    u: float
    m: float
    n_sites: int
    j: float
    h: float = 0.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.j <= 0.0:
            raise ValueError(f"coupling j must be positive, got {self.j}")
        if abs(self.m) > self.n_sites / 2 + 1e-9:
            raise ValueError(f"|m|={abs(self.m)} exceeds n_sites/2={self.n_sites / 2}")


def thermal_witness(obs: MacroObservables) -> float:
    """Entanglement witness from (U, M, h); negative output certifies entanglement."""
    w = (obs.u + obs.m * obs.h) / (obs.n_sites * obs.j) + obs.h / (2.0 * obs.j)
    return (w + _SQRT2 / 2.0) ** 2 - (obs.m / obs.n_sites) ** 2 - 0.25


def zero_field_energy_criterion(u: float, n_sites: int, j: float) -> bool:
    """Zero-field entanglement test |u|/(n_sites j) > (sqrt(2)-1)/2.

    Wider than the |u|/(n_sites j) > 1/4 sufficient condition: every energy
    accepted by the 1/4 bound is accepted here as well.
    """
    if j <= 0.0:
        raise ValueError(f"coupling j must be positive, got {j}")
    if n_sites < 2:
        raise ValueError(f"n_sites must be >= 2, got {n_sites}")
    return abs(u) / (n_sites * j) > (_SQRT2 - 1.0) / 2.0


def spin_energy_to_band(u_spin: float, n_sites: int, h: float) -> float:
    """Convert a spin-chain internal energy (Zeeman term -h S^z) to the band convention."""
    return u_spin - n_sites * h / 2.0


def macro_observables_from_xy(
    point: XYPointResult, params: XYChainParams, n_sites: int
) -> MacroObservables:
    """Reconstruct the extensive (U, M) a thermodynamic-limit chain would report.

    Per site the band energy is j*z - h*n and the magnetization is n - 1/2;
    feeding the result back into :func:`thermal_witness` reproduces the
    microscopic indicator phi identically.
    """
    u = n_sites * (params.j * point.z - params.h * point.n)
    m = n_sites * (point.n - 0.5)
    return MacroObservables(u=u, m=m, n_sites=n_sites, j=params.j, h=params.h)
