"""Thermal pairwise entanglement of S=1/2 spin chains under magnetic fields.

Subpackages by task:

* :mod:`spinent.numerics` - Chebyshev-weight quadrature, bracketed root
  finding, damped fixed-point iteration;
* :mod:`spinent.pairwise` - two-qubit density matrices and concurrence;
* :mod:`spinent.xy_chain` - exact thermodynamic-limit XY chain in a
  transverse field, critical temperature and entanglement indicator;
* :mod:`spinent.witness` - macroscopic (U, M, h) entanglement witness;
* :mod:`spinent.ed` - exact diagonalization of arbitrary finite chains,
  the ground-truth oracle at small size;
* :mod:`spinent.meanfield` - Hartree-Fock treatment of the alternating
  AF-F Heisenberg chain;
* :mod:`spinent.cli` / :mod:`spinent.plots` - the ``spinent`` command line
  (deterministic CSV sweeps, optional figures).
"""

from .numerics import (
    BracketError,
    ConvergenceError,
    FixedPointSpec,
    QuadratureSpec,
    RootSpec,
    find_root_bracketed,
    fixed_point_solve,
    integrate_chebyshev_weight,
)
from .pairwise import (
    BondObservables,
    ConcurrenceResult,
    InvalidStateError,
    TwoQubitDensityMatrix,
    bond_observables_to_density_matrix,
    wootters_concurrence,
    xstate_concurrence,
)
from .xy_chain import (
    XYChainParams,
    XYPointResult,
    critical_temperature,
    critical_temperature_integral_form,
    evaluate_point,
    phi_indicator,
)
from .witness import (
    MacroObservables,
    macro_observables_from_xy,
    spin_energy_to_band,
    thermal_witness,
    zero_field_energy_criterion,
)
from .ed import (
    FiniteChainSpec,
    ThermalEDResult,
    alternating_chain_spec,
    bond_concurrence,
    build_hamiltonian,
    critical_temperature_ed,
    thermal_expectations,
    xy_chain_spec,
)
from .meanfield import (
    AlternatingParams,
    MeanFieldState,
    MFResult,
    mf_concurrences,
    mf_critical_temperature,
    self_consistent_solve,
)

__version__ = "0.1.0"
