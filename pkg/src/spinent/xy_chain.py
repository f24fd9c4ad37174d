"""Exact thermodynamic-limit solution of the S=1/2 XY chain in a transverse field.

The chain H = sum_i (J/2)(S+_i S-_{i+1} + h.c.) - h sum_i S^z_i maps to free
spinless fermions with band dispersion J cos k, occupied according to the
Fermi factor f(k) = 1/(exp((J cos k - h)/T) + 1).  Every bond observable is
then a band integral over x = cos k with the Chebyshev weight:

    z        = (1/pi) * int x f(x) / sqrt(1-x^2) dx      (hopping, <= 0 for J > 0)
    n        = (1/pi) * int   f(x) / sqrt(1-x^2) dx      (site density)
    x_plus   = n^2 - z^2                                 (double occupancy, Wick)
    x_minus  = 1 - 2n + x_plus

and the nearest-neighbor concurrence follows from the X-state closed form.
The indicator phi = n + sqrt(2) z + z^2 - n^2 is negative exactly where the
pre-clamp concurrence is positive, so the critical temperature is its root.

At zero field the critical point satisfies z = (1 - sqrt(2))/2, which pins
T_c = alpha J with alpha = 0.484313 (both determined here numerically, not
hard-coded).  The critical temperature turns out to be only approximately
field-independent: T_c(h) grows quadratically in h, by about 9.5e-4 J from
h = 0 to h = 1.2 J.  See ``critical_temperature`` and the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .numerics import (
    DEFAULT_QUADRATURE,
    BracketError,
    QuadratureSpec,
    RootSpec,
    find_root_bracketed,
    integrate_chebyshev_weight,
)
from .pairwise import BondObservables, ConcurrenceResult, xstate_concurrence

__all__ = [
    "XYChainParams",
    "XYPointResult",
    "fermi_occupation",
    "hopping_z",
    "density_n",
    "double_occupancy_x_plus",
    "phi_indicator",
    "evaluate_point",
    "concurrence_direct",
    "critical_temperature",
    "critical_temperature_integral_form",
    "fixed_point_identity_residual",
    "TC_BRACKET",
]

_SQRT2 = math.sqrt(2.0)

# Bracket (in units of j) inside which the phi root is searched; chosen
# around the known zero-field value ~0.4843 j.  No sign change in here is
# reported as absence of a critical temperature, not extrapolated.
TC_BRACKET = (0.1, 1.0)


@dataclass(frozen=True)
class XYChainParams:
    """Coupling j > 0, field h and temperature t, all in the same energy units.

    Zero temperature is a separate limit flag: the Fermi factors become step
    functions evaluated in closed form, avoiding any division by t.
    """

    j: float
    h: float = 0.0
    t: float = 0.0
    zero_temperature: bool = False

    def __post_init__(self):
        if self.j <= 0.0:
            raise ValueError(f"coupling j must be positive, got {self.j}")
        if not self.zero_temperature and self.t <= 0.0:
            raise ValueError(
                f"temperature must be positive (got {self.t}); "
                "use zero_temperature=True for the t -> 0 limit"
            )

    @classmethod
    def at_zero_temperature(cls, j: float, h: float = 0.0) -> "XYChainParams":
        return cls(j=j, h=h, t=0.0, zero_temperature=True)


@dataclass(frozen=True)
class XYPointResult:
    """Bond observables, concurrence and entanglement indicator at one (t, h)."""

    z: float
    n: float
    x_plus: float
    x_minus: float
    concurrence: ConcurrenceResult
    phi: float

    def to_bond_observables(self) -> BondObservables:
        y = self.n - self.x_plus  # both single-occupancy weights equal in the bulk
        return BondObservables(
            x_plus=self.x_plus, y_plus=y, y_minus=y, z=self.z, x_minus=self.x_minus
        )


def fermi_occupation(x, params: XYChainParams):
    """Fermi factor 1/(exp((j x - h)/t) + 1) at x = cos k; overflow-safe.

    Accepts a scalar or array ``x`` in [-1, 1].  In the zero-temperature
    limit this is the filling step (1 below the chemical potential, 0 above,
    1/2 on it).
    """
    x = np.asarray(x, dtype=float)
    if params.zero_temperature:
        band = params.j * x
        out = np.where(band < params.h, 1.0, np.where(band > params.h, 0.0, 0.5))
    else:
        out = expit((params.h - params.j * x) / params.t)
    return float(out) if out.ndim == 0 else out


def hopping_z(params: XYChainParams, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Nearest-neighbor hopping amplitude <c_i^+ c_{i+1}>; real and <= 0 for j > 0."""
    if params.zero_temperature:
        u = params.h / params.j
        if abs(u) >= 1.0:
            return 0.0
        return -math.sqrt(1.0 - u * u) / math.pi
    val = integrate_chebyshev_weight(lambda x: x * fermi_occupation(x, params), quad)
    return val / math.pi


def density_n(params: XYChainParams, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Site occupation <n_i> in [0, 1]; exactly 1/2 at h = 0."""
    if params.zero_temperature:
        u = params.h / params.j
        if u >= 1.0:
            return 1.0
        if u <= -1.0:
            return 0.0
        return 0.5 + math.asin(u) / math.pi
    val = integrate_chebyshev_weight(lambda x: fermi_occupation(x, params), quad)
    return val / math.pi


def double_occupancy_x_plus(
    params: XYChainParams, quad: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """<n_i n_{i+1}> = n^2 - z^2 (Wick factorization of the free-fermion state)."""
    n = density_n(params, quad)
    z = hopping_z(params, quad)
    x_plus = n * n - z * z
    if x_plus < -1e-12:
        # |z| <= n holds analytically; anything beyond rounding is a bug.
        raise RuntimeError(f"double occupancy came out negative: {x_plus}")
    return max(x_plus, 0.0)


def phi_indicator(params: XYChainParams, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Entanglement indicator phi = n + sqrt(2) z + z^2 - n^2.

    phi < 0 exactly where the pre-clamp concurrence is positive (given the
    antiferromagnetic sign z <= 0), so the critical temperature is phi's root.
    """
    n = density_n(params, quad)
    z = hopping_z(params, quad)
    return n + _SQRT2 * z + z * z - n * n


def evaluate_point(
    params: XYChainParams,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    cross_check: bool = False,
) -> XYPointResult:
    """Assemble all bond observables, the concurrence and phi at one point.

    With ``cross_check=True`` the independent three-integral concurrence
    route (:func:`concurrence_direct`) is evaluated as well and must agree
    with the observable-based route to 1e-9 whenever z <= 0.
    """
    n = density_n(params, quad)
    z = hopping_z(params, quad)
    x_plus = max(n * n - z * z, 0.0)
    x_minus = 1.0 - 2.0 * n + x_plus
    conc = xstate_concurrence(
        BondObservables(
            x_plus=x_plus,
            y_plus=n - x_plus,
            y_minus=n - x_plus,
            z=z,
            x_minus=x_minus,
        )
    )
    phi = n + _SQRT2 * z + z * z - n * n
    # the three-integral route needs a smooth Fermi factor, so the
    # zero-temperature step limit is excluded from the cross-check
    if cross_check and not params.zero_temperature and z <= 0.0:
        direct = concurrence_direct(params, quad)
        if abs(direct - conc.c_tilde) > 1e-9:
            raise RuntimeError(
                f"three-integral concurrence {direct!r} disagrees with the "
                f"observable route {conc.c_tilde!r}"
            )
    return XYPointResult(
        z=z, n=n, x_plus=x_plus, x_minus=x_minus, concurrence=conc, phi=phi
    )


def concurrence_direct(
    params: XYChainParams, quad: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Pre-clamp concurrence from three explicit band integrals.

    The weights sqrt((1 +/- x)/(1 -/+ x)) are rewritten as (1 +/- x) over the
    Chebyshev weight so a single quadrature family covers all three integrals.
    This form presupposes z <= 0 (which holds for j > 0) and exists as an
    independent verification of the observable-based route.  Requires t > 0:
    the zero-temperature limit turns the integrands into step functions.
    """
    if params.zero_temperature:
        raise ValueError(
            "the three-integral route needs t > 0 (step-function integrands "
            "do not converge under smooth quadrature)"
        )

    def f(x):
        return fermi_occupation(x, params)

    i1 = integrate_chebyshev_weight(lambda x: x * f(x), quad)
    ip = integrate_chebyshev_weight(lambda x: (1.0 + x) * f(x), quad)
    im = integrate_chebyshev_weight(lambda x: (1.0 - x) * f(x), quad)
    inner = max(ip * im, 0.0) * max((ip / math.pi - 1.0) * (im / math.pi - 1.0), 0.0)
    return -(2.0 / math.pi) * (i1 + math.sqrt(inner))


def critical_temperature(
    h: float,
    j: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    abs_tol: float = 1e-10,
    cross_check: bool = True,
) -> float:
    """Temperature at which the nearest-neighbor entanglement vanishes.

    Solves phi(t) = 0 on the bracket TC_BRACKET (in units of j).  At h = 0
    the root is cross-checked against the dedicated zero-field integral
    equation (:func:`critical_temperature_integral_form`); the two routes
    must agree to 1e-8 j.

    Raises
    ------
    BracketError
        If phi has no sign change inside the bracket (no critical
        temperature in the searched window).
    """
    if j <= 0.0:
        raise ValueError(f"coupling j must be positive, got {j}")

    def phi_at(t: float) -> float:
        return phi_indicator(XYChainParams(j=j, h=h, t=t), quad)

    spec = RootSpec(lo=TC_BRACKET[0] * j, hi=TC_BRACKET[1] * j, abs_tol=abs_tol * j)
    try:
        tc = find_root_bracketed(phi_at, spec)
    except BracketError as exc:
        raise BracketError(
            f"no critical temperature on [{spec.lo}, {spec.hi}] "
            f"for h={h}, j={j}: {exc}"
        ) from exc
    if cross_check and h == 0.0:
        tc_integral = critical_temperature_integral_form(j, quad, abs_tol)
        if abs(tc - tc_integral) > 1e-8 * j:
            raise RuntimeError(
                f"zero-field critical temperature routes disagree: "
                f"phi root {tc!r} vs integral form {tc_integral!r}"
            )
    return tc


def critical_temperature_integral_form(
    j: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    abs_tol: float = 1e-10,
) -> float:
    """Zero-field critical temperature from its dedicated integral equation.

    Solves (sqrt(2)-1)/2 = (j/(pi t)) * int_0^1 sqrt(1-x^2)/(1+cosh(j x/t)) dx,
    which is the z = (1-sqrt(2))/2 condition integrated by parts.  Shows
    directly that the zero-field critical temperature is proportional to j.
    """
    if j <= 0.0:
        raise ValueError(f"coupling j must be positive, got {j}")

    def resid(t: float) -> float:
        def g(x):
            # even integrand: int_0^1 sqrt(1-x^2) w dx = (1/2) int_{-1}^{1} (1-x^2) w / sqrt(1-x^2) dx
            # with w = 1/(1 + cosh(j x / t)) = 1/(2 cosh^2(j x / 2t))
            y = np.clip(j * x / t, -700.0, 700.0)
            return (1.0 - x * x) * (0.5 / np.cosh(0.5 * y) ** 2)
        val = 0.5 * integrate_chebyshev_weight(g, quad)
        return (_SQRT2 - 1.0) / 2.0 - (j / (math.pi * t)) * val

    spec = RootSpec(lo=TC_BRACKET[0] * j, hi=TC_BRACKET[1] * j, abs_tol=abs_tol * j)
    return find_root_bracketed(resid, spec)


def fixed_point_identity_residual(
    h: float,
    j: float,
    delta_h: float | None = None,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Residual of the critical-point derivative identity at T_c(h).

    Evaluates |2 (1 + sqrt(2) z) dz/dh - sqrt(2) (2n - 1) dn/dh| at the
    critical temperature, with central finite differences in h.  The
    identity is exact at h = 0 (by field-reflection symmetry both sides
    vanish); at finite field it holds only as well as the critical
    temperature is field-independent, i.e. to a few times 1e-4 in practice,
    because the residual equals sqrt(2) |dphi/dh| = sqrt(2) |dphi/dt| |dT_c/dh|.
    """
    if delta_h is None:
        delta_h = 1e-5 * j
    tc = critical_temperature(h, j, quad)
    plus = XYChainParams(j=j, h=h + delta_h, t=tc)
    minus = XYChainParams(j=j, h=h - delta_h, t=tc)
    dz = (hopping_z(plus, quad) - hopping_z(minus, quad)) / (2.0 * delta_h)
    dn = (density_n(plus, quad) - density_n(minus, quad)) / (2.0 * delta_h)
    at = XYChainParams(j=j, h=h, t=tc)
    z = hopping_z(at, quad)
    n = density_n(at, quad)
    lhs = 2.0 * (1.0 + _SQRT2 * z) * dz
    rhs = _SQRT2 * (2.0 * n - 1.0) * dn
    return abs(lhs - rhs)
