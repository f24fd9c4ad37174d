"""Hartree-Fock mean field for the alternating AF-F Heisenberg chain.

The chain couples a-sites and b-sites of each two-site cell with j_a > 0
and neighboring cells with j_f < 0.  After the fermion mapping, the quartic
density-density terms are factorized into four self-consistent bilinears:
cell densities d_a = <a+ a>, d_b = <b+ b> and bond amplitudes
p_ab = <b+_j a_j> (intracell) and p_ba = <a+_{j+1} b_j> (intercell).  The
resulting quadratic momentum-space Hamiltonian is, per mode k in [-pi, pi],

    [[(j_a+j_f)(d_b-1/2) - h,   j_a(1/2-p_ab) e^{ik/2} + j_f(1/2-conj(p_ba)) e^{-ik/2}],
     [h.c.,                     (j_a+j_f)(d_a-1/2) - h]]

diagonalized by a 2x2 unitary into two quasiparticle bands occupied with
Fermi factors (grand canonical; the field plays the chemical potential, no
separate filling constraint).  Zone averages of the transformed bilinears
close the self-consistency loop.

The reality of p_ab and the equality d_a = d_b at convergence are emergent
results, not assumptions: the iteration state is complex throughout.

Concurrences follow the same bond-observable route as everywhere else:
z = conj(p), x_plus = d_i d_j - |p|^2 (Wick), x_minus = 1 - d_i - d_j + x_plus.
The intracell (j_a) concurrence vanishes at a nearly field-independent
critical temperature; the intercell (j_f) one exists only in a window of
fields and its critical temperature grows with the field.  Mean-field
numbers are qualitative, not quantitative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.special import expit

from .numerics import ConvergenceError, FixedPointSpec, RootSpec, find_root_bracketed, fixed_point_solve
from .pairwise import BondObservables, ConcurrenceResult, xstate_concurrence

__all__ = [
    "AlternatingParams",
    "MeanFieldState",
    "MFResult",
    "DEFAULT_SEED",
    "hf_hamiltonian_k",
    "self_consistent_solve",
    "mf_concurrences",
    "mf_critical_temperature",
    "ct_identity_residuals",
]

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class AlternatingParams:
    """Couplings j_a > 0 > j_f, field h, temperature t, and zone mesh size."""

    j_a: float
    j_f: float
    h: float
    t: float
    n_k: int = 2048

    def __post_init__(self):
        if not self.j_a > 0.0 > self.j_f:
            raise ValueError(f"need j_a > 0 > j_f, got j_a={self.j_a}, j_f={self.j_f}")
        if self.t <= 0.0:
            raise ValueError(f"temperature must be positive, got {self.t}")
        if self.n_k < 256 or self.n_k % 2:
            raise ValueError(f"n_k must be even and >= 256, got {self.n_k}")


@dataclass(frozen=True)
class MeanFieldState:
    """Self-consistent order parameters; densities real, bond amplitudes complex."""

    d_a: float
    d_b: float
    p_ab: complex
    p_ba: complex
    converged: bool = False
    residual: float = math.inf


# Generic symmetry-breaking seed; the trivial p = 0 point can be a spurious
# fixed point of the iteration.
DEFAULT_SEED = MeanFieldState(d_a=0.5, d_b=0.5, p_ab=0.3 + 0.0j, p_ba=0.1 + 0.0j)

DEFAULT_FIXED_POINT = FixedPointSpec(mixing=0.5, abs_tol=1e-10, max_iter=2000)


@dataclass(frozen=True)
class MFResult:
    """Converged state, both bond concurrences, and the quasiparticle bands."""

    state: MeanFieldState
    c_a: ConcurrenceResult
    c_f: ConcurrenceResult
    band_minus: Callable
    band_plus: Callable


def _diag_entries(state: MeanFieldState, params: AlternatingParams):
    shift = params.j_a + params.j_f
    e_a = shift * (state.d_b - 0.5) - params.h
    e_b = shift * (state.d_a - 0.5) - params.h
    return e_a, e_b


def _hopping(state: MeanFieldState, params: AlternatingParams, k):
    phase = np.exp(0.5j * np.asarray(k, dtype=float))
    return params.j_a * (0.5 - state.p_ab) * phase + params.j_f * (
        0.5 - np.conj(state.p_ba)
    ) * np.conj(phase)


def hf_hamiltonian_k(state: MeanFieldState, params: AlternatingParams, k: float) -> np.ndarray:
    """The 2x2 Hermitian mean-field Hamiltonian at momentum k in [-pi, pi]."""
    e_a, e_b = _diag_entries(state, params)
    t_k = complex(_hopping(state, params, float(k)))
    return np.array([[e_a, t_k], [np.conj(t_k), e_b]], dtype=complex)


def _k_mesh(n_k: int) -> np.ndarray:
    # midpoint grid: symmetric about 0, avoids the duplicated zone edge
    return -math.pi + (np.arange(n_k) + 0.5) * (2.0 * math.pi / n_k)


def _map_step(state: MeanFieldState, params: AlternatingParams) -> MeanFieldState:
    """One self-consistency update: diagonalize on the mesh, occupy, zone-average."""
    k = _k_mesh(params.n_k)
    phase = np.exp(0.5j * k)
    e_a, e_b = _diag_entries(state, params)
    t_k = _hopping(state, params, k)
    mid = 0.5 * (e_a + e_b)
    mz = 0.5 * (e_a - e_b)
    gap = np.sqrt(mz * mz + np.abs(t_k) ** 2)
    f_plus = expit(-(mid + gap) / params.t)
    f_minus = expit(-(mid - gap) / params.t)
    f_mid = expit(-mid / params.t)
    # (f+ - f-)/(2 gap), with the analytic gap -> 0 limit -f_mid(1-f_mid)/t
    with np.errstate(invalid="ignore", divide="ignore"):
        coef = np.where(
            gap > 1e-300, (f_plus - f_minus) / (2.0 * gap), -f_mid * (1.0 - f_mid) / params.t
        )
    occ_mean = 0.5 * (f_plus + f_minus)
    d_a = float(np.mean(occ_mean + coef * mz).real)
    d_b = float(np.mean(occ_mean - coef * mz).real)
    p_ab = complex(np.mean(np.conj(phase) * coef * t_k))
    p_ba = complex(np.mean(np.conj(phase) * coef * np.conj(t_k)))
    return MeanFieldState(d_a=d_a, d_b=d_b, p_ab=p_ab, p_ba=p_ba)


def _pack(state: MeanFieldState) -> np.ndarray:
    return np.array([state.d_a, state.d_b, state.p_ab, state.p_ba], dtype=complex)


def _unpack(v: np.ndarray, converged: bool, residual: float) -> MeanFieldState:
    return MeanFieldState(
        d_a=float(v[0].real),
        d_b=float(v[1].real),
        p_ab=complex(v[2]),
        p_ba=complex(v[3]),
        converged=converged,
        residual=residual,
    )


def self_consistent_solve(
    params: AlternatingParams,
    initial: MeanFieldState | None = None,
    fp: FixedPointSpec = DEFAULT_FIXED_POINT,
    max_restarts: int = 4,
    mesh_doublings: int = 4,
) -> MeanFieldState:
    """Iterate the mean-field map to self-consistency.

    Damped fixed-point iteration from ``initial`` (default: the generic
    seed).  On non-convergence the mixing is halved and the solve restarts
    from the last iterate, at most ``max_restarts`` times.  After
    convergence the zone mesh is doubled (up to ``mesh_doublings`` times)
    until one map application moves no observable by more than the
    fixed-point tolerance, so the returned state is mesh-converged.

    Raises
    ------
    ConvergenceError
        If the damped iteration still has not settled after all restarts;
        carries the final residual and packed state.
    """
    state = DEFAULT_SEED if initial is None else initial
    work = params

    def run(start: MeanFieldState, spec: FixedPointSpec) -> MeanFieldState:
        def step(v: np.ndarray) -> np.ndarray:
            return _pack(_map_step(_unpack(v, False, math.inf), work))

        mixing = spec.mixing
        v0 = _pack(start)
        last_exc = None
        for _ in range(max_restarts + 1):
            try:
                v = fixed_point_solve(step, v0, replace(spec, mixing=mixing))
                final = float(np.max(np.abs(step(v) - v)))
                return _unpack(v, True, final)
            except ConvergenceError as exc:
                last_exc = exc
                v0 = exc.state
                mixing *= 0.5
        raise ConvergenceError(
            f"mean-field iteration failed after {max_restarts} mixing restarts "
            f"(residual {last_exc.residual:.3e})",
            residual=last_exc.residual,
            state=last_exc.state,
        )

    solved = run(state, fp)
    tol = max(fp.abs_tol, 1e-10)
    for _ in range(mesh_doublings):
        finer = replace(work, n_k=2 * work.n_k)
        drift = float(
            np.max(np.abs(_pack(_map_step(solved, finer)) - _pack(solved)))
        )
        if drift < tol:
            break
        work = finer
        solved = run(solved, fp)
    return solved


def _bond_observables(d_i: float, d_j: float, p: complex) -> BondObservables:
    x_plus = d_i * d_j - abs(p) ** 2
    return BondObservables(
        x_plus=x_plus,
        y_plus=d_i - x_plus,
        y_minus=d_j - x_plus,
        z=np.conj(p),
        x_minus=1.0 - d_i - d_j + x_plus,
    )


def mf_concurrences(state: MeanFieldState, params: AlternatingParams) -> MFResult:
    """Concurrence of the intracell (j_a) and intercell (j_f) bonds.

    Requires a converged state.  Raises InvalidStateError (from the bond
    observables) if the state violates an observable invariant.
    """
    if not state.converged:
        raise ValueError("mf_concurrences requires a converged MeanFieldState")
    c_a = xstate_concurrence(_bond_observables(state.d_a, state.d_b, state.p_ab))
    c_f = xstate_concurrence(_bond_observables(state.d_b, state.d_a, state.p_ba))

    def band_minus(k):
        e_a, e_b = _diag_entries(state, params)
        t_k = _hopping(state, params, k)
        mid, mz = 0.5 * (e_a + e_b), 0.5 * (e_a - e_b)
        return mid - np.sqrt(mz * mz + np.abs(t_k) ** 2)

    def band_plus(k):
        e_a, e_b = _diag_entries(state, params)
        t_k = _hopping(state, params, k)
        mid, mz = 0.5 * (e_a + e_b), 0.5 * (e_a - e_b)
        return mid + np.sqrt(mz * mz + np.abs(t_k) ** 2)

    return MFResult(state=state, c_a=c_a, c_f=c_f, band_minus=band_minus, band_plus=band_plus)


def ct_identity_residuals(state: MeanFieldState, bond: str) -> tuple:
    """Residuals of the two equivalent critical-temperature conditions.

    Returns (product_form, simplified_form).  The product form is
    |y_plus * y_minus - 2 |p|^2| for the bond; the simplified form uses the
    emergent d_a = d_b and real p:  |d - d^2 - (sqrt(2)|p| - |p|^2)|.
    (With the converged sign p_ab < 0 this is the same as d - d^2 =
    -sqrt(2) p - p^2; using |p| keeps it gauge-independent.)  Both vanish
    exactly at the bond's critical temperature.
    """
    if bond == "a":
        d_i, d_j, p = state.d_a, state.d_b, state.p_ab
    elif bond == "f":
        d_i, d_j, p = state.d_b, state.d_a, state.p_ba
    else:
        raise ValueError(f"bond must be 'a' or 'f', got {bond!r}")
    obs = _bond_observables(d_i, d_j, p)
    product = abs(obs.y_plus * obs.y_minus - 2.0 * abs(p) ** 2)
    simplified = abs(d_i - d_i * d_i - (_SQRT2 * abs(p) - abs(p) ** 2))
    return product, simplified


def mf_critical_temperature(
    j_a: float,
    j_f: float,
    h: float,
    bond: str,
    n_k: int = 2048,
    t_min: float | None = None,
    t_max: float | None = None,
    n_scan: int = 60,
    abs_tol: float = 1e-10,
):
    """Temperature where the bond's pre-clamp concurrence crosses zero.

    Coarse upward scan with warm-started self-consistent solves, then
    bracketed root refinement.  Returns None when the bond is never
    entangled in the scanned window.  At the returned temperature the
    simplified critical-point identity must hold to 1e-6 (internal check).
    """
    if bond not in ("a", "f"):
        raise ValueError(f"bond must be 'a' or 'f', got {bond!r}")
    t_lo = 0.02 * j_a if t_min is None else t_min
    t_hi = 2.0 * j_a if t_max is None else t_max

    warm = {"state": None}

    def c_tilde(t: float) -> float:
        params = AlternatingParams(j_a=j_a, j_f=j_f, h=h, t=t, n_k=n_k)
        state = self_consistent_solve(params, initial=warm["state"])
        warm["state"] = state
        result = mf_concurrences(state, params)
        return (result.c_a if bond == "a" else result.c_f).c_tilde

    ts = np.linspace(t_lo, t_hi, n_scan)
    vals = np.array([c_tilde(t) for t in ts])
    crossings = [i for i in range(n_scan - 1) if vals[i] > 0.0 >= vals[i + 1]]
    if not crossings:
        if np.all(vals <= 0.0):
            return None
        raise ValueError(f"c_tilde still positive at t_max={t_hi}; extend the scan window")
    i = crossings[-1]
    tc = find_root_bracketed(
        c_tilde, RootSpec(lo=float(ts[i]), hi=float(ts[i + 1]), abs_tol=abs_tol * j_a)
    )
    params = AlternatingParams(j_a=j_a, j_f=j_f, h=h, t=tc, n_k=n_k)
    state = self_consistent_solve(params, initial=warm["state"])
    _, simplified = ct_identity_residuals(state, bond)
    if simplified > 1e-6:
        raise RuntimeError(
            f"critical-point identity violated at t={tc}: residual {simplified:.3e}"
        )
    return tc
