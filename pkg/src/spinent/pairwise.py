"""Two-qubit density matrices and pairwise concurrence.

Conventions fixed here and adopted by every other module:

* the two-spin product basis is ordered (uu, ud, du, dd);
* fermionic occupation n=1 corresponds to spin up, S^z = n - 1/2, so a
  number-conserving (U(1)-symmetric) bond is described by five real
  observables: the double occupancy ``x_plus`` = <n_i n_j>, the single
  occupancies ``y_plus`` = <n_i (1-n_j)> and ``y_minus`` = <n_j (1-n_i)>,
  the hopping amplitude ``z`` = <c_i^+ c_j>, and the empty-pair weight
  ``x_minus``.  These fill the X-shaped density matrix

      [[x_plus, 0,      0,       0      ],
       [0,      y_plus, conj(z), 0      ],
       [0,      z,      y_minus, 0      ],
       [0,      0,      0,       x_minus]].

Concurrence comes either from the general spin-flip construction
(:func:`wootters_concurrence`) or, for the X-shaped matrix above, from
the closed form 2(|z| - sqrt(x_plus x_minus)) (:func:`xstate_concurrence`).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "POSITIVITY_TOL",
    "InvalidStateError",
    "ConcurrenceResult",
    "TwoQubitDensityMatrix",
    "BondObservables",
    "wootters_concurrence",
    "xstate_concurrence",
    "bond_observables_to_density_matrix",
]

# Thermal matrices assembled from quadrature or diagonalization carry
# rounding noise; eigenvalues above -POSITIVITY_TOL are clamped to zero.
POSITIVITY_TOL = 1e-9

# sigma_y (x) sigma_y in the (uu, ud, du, dd) basis; real.
_SYSY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


class InvalidStateError(ValueError):
    """Input violates a density-matrix or observable invariant."""


@dataclass(frozen=True)
class ConcurrenceResult:
    """Pre-clamp value ``c_tilde`` and the concurrence ``c = max(0, c_tilde)``."""

    c_tilde: float
    c: float

    @classmethod
    def from_c_tilde(cls, c_tilde: float) -> "ConcurrenceResult":
        c_tilde = float(c_tilde)
        return cls(c_tilde=c_tilde, c=max(0.0, c_tilde))


@dataclass(frozen=True, eq=False)
class TwoQubitDensityMatrix:
    """4x4 Hermitian, unit-trace, positive matrix in the (uu, ud, du, dd) basis."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise InvalidStateError(f"expected a 4x4 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > POSITIVITY_TOL:
            raise InvalidStateError("matrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > POSITIVITY_TOL or abs(np.trace(m).imag) > POSITIVITY_TOL:
            raise InvalidStateError(f"trace is {np.trace(m)}, expected 1")
        if np.linalg.eigvalsh(m).min() < -POSITIVITY_TOL:
            raise InvalidStateError("matrix has an eigenvalue below -tolerance")
        object.__setattr__(self, "entries", m)


@dataclass(frozen=True)
class BondObservables:
    """The five independent elements of a number-conserving two-site bond."""

    x_plus: float
    y_plus: float
    y_minus: float
    z: complex
    x_minus: float

    def __post_init__(self):
        diag = (self.x_plus, self.y_plus, self.y_minus, self.x_minus)
        for name, value in zip(("x_plus", "y_plus", "y_minus", "x_minus"), diag):
            if not -POSITIVITY_TOL <= value <= 1.0 + POSITIVITY_TOL:
                raise InvalidStateError(f"{name}={value} outside [0, 1]")
        if abs(sum(diag) - 1.0) > POSITIVITY_TOL:
            raise InvalidStateError(f"diagonal sums to {sum(diag)}, expected 1")
        # positivity of the central 2x2 block
        if abs(self.z) ** 2 > self.y_plus * self.y_minus + POSITIVITY_TOL:
            raise InvalidStateError(
                f"|z|^2={abs(self.z)**2:.3e} exceeds y_plus*y_minus="
                f"{self.y_plus * self.y_minus:.3e}"
            )


def wootters_concurrence(rho: TwoQubitDensityMatrix) -> ConcurrenceResult:
    """Concurrence of an arbitrary two-qubit state.

    The mu_i are the descending square roots of the eigenvalues of
    rho * (sigma_y x sigma_y) rho^* (sigma_y x sigma_y); eigenvalues in
    (-POSITIVITY_TOL, 0) are clamped to zero before the square root, and
    c_tilde = mu_1 - mu_2 - mu_3 - mu_4.

    Raises
    ------
    InvalidStateError
        If the product matrix has an eigenvalue below -POSITIVITY_TOL.
    """
    m = rho.entries
    flipped = _SYSY @ m.conj() @ _SYSY
    lam = np.linalg.eigvals(m @ flipped).real
    if lam.min() < -POSITIVITY_TOL:
        raise InvalidStateError(
            f"spin-flipped product has eigenvalue {lam.min():.3e} below -tolerance"
        )
    mu = np.sort(np.sqrt(np.clip(lam, 0.0, None)))[::-1]
    return ConcurrenceResult.from_c_tilde(mu[0] - mu[1] - mu[2] - mu[3])


def xstate_concurrence(b: BondObservables) -> ConcurrenceResult:
    """Closed-form concurrence of the X-shaped bond state.

    c_tilde = 2(|z| - sqrt(x_plus * x_minus)).  For any valid
    :class:`BondObservables` the clamped concurrence agrees with the
    general construction applied to the embedded 4x4 matrix.
    """
    prod = b.x_plus * b.x_minus
    if prod < -POSITIVITY_TOL:
        raise InvalidStateError(f"x_plus*x_minus={prod:.3e} below -tolerance")
    return ConcurrenceResult.from_c_tilde(2.0 * (abs(b.z) - math.sqrt(max(prod, 0.0))))


def bond_observables_to_density_matrix(b: BondObservables) -> TwoQubitDensityMatrix:
    """Embed bond observables into the 4x4 X-shaped density matrix.

    Raises
    ------
    InvalidStateError
        If the assembled matrix violates positivity beyond tolerance.
    """
    z = complex(b.z)
    m = np.array(
        [
            [b.x_plus, 0.0, 0.0, 0.0],
            [0.0, b.y_plus, z.conjugate(), 0.0],
            [0.0, z, b.y_minus, 0.0],
            [0.0, 0.0, 0.0, b.x_minus],
        ],
        dtype=complex,
    )
    return TwoQubitDensityMatrix(m)
