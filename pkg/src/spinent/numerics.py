"""Reusable numerical kernels for the chain solvers.

Three building blocks live here:

* quadrature against the Chebyshev weight 1/sqrt(1-x^2) on [-1, 1],
  which absorbs the square-root endpoint singularities of the band
  integrals, so integrands are only ever evaluated at interior points;
* safeguarded bracketed root finding (bisection/interpolation hybrid);
* damped fixed-point iteration for self-consistent solves.

All routines are pure functions of their inputs and may be called
concurrently without coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "BracketError",
    "ConvergenceError",
    "QuadratureSpec",
    "RootSpec",
    "FixedPointSpec",
    "DEFAULT_QUADRATURE",
    "integrate_chebyshev_weight",
    "find_root_bracketed",
    "fixed_point_solve",
]


class ConvergenceError(RuntimeError):
    """An iterative method exhausted its iteration or order budget.

    Carries whatever diagnostic the method had at the point of failure:
    ``estimates`` (last two quadrature values), ``residual`` and ``state``
    (fixed-point iteration), or ``bracket`` (root finding).
    """

    def __init__(self, message, *, estimates=None, residual=None, state=None,
                 bracket=None):
        super().__init__(message)
        self.estimates = estimates
        self.residual = residual
        self.state = state
        self.bracket = bracket


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Node budget for the Chebyshev-weight quadrature.

    ``order`` is the starting node count; it doubles until two successive
    estimates agree to ``rel_tol`` or ``max_order`` is exceeded.
    """

    order: int = 64
    max_order: int = 16384
    rel_tol: float = 1e-12

    def __post_init__(self):
        if self.order < 8:
            raise ValueError(f"order must be >= 8, got {self.order}")
        if self.max_order < self.order:
            raise ValueError("max_order must be >= order")
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError("rel_tol must lie in (0, 1)")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class RootSpec:
    """Bracket and stopping rule for :func:`find_root_bracketed`."""

    lo: float
    hi: float
    abs_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.abs_tol <= 0.0:
            raise ValueError("abs_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


@dataclass(frozen=True)
class FixedPointSpec:
    """Damping and stopping rule for :func:`fixed_point_solve`."""

    mixing: float = 0.5
    abs_tol: float = 1e-10
    max_iter: int = 500

    def __post_init__(self):
        if not 0.0 < self.mixing <= 1.0:
            raise ValueError("mixing must lie in (0, 1]")
        if self.abs_tol <= 0.0:
            raise ValueError("abs_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


def _chebyshev_estimate(g: Callable, n: int):
    """One fixed-order Gauss-Chebyshev (first kind) pass.

    Nodes x_i = cos((2i-1) pi / 2n) with uniform weight pi/n. The node set
    is assembled as exact +/- pairs, so odd-symmetry cancellation is limited
    only by the integrand's own rounding, never by node placement.  Returns
    (estimate, mass) where mass is the same rule applied to |g|, a magnitude
    proxy used to recognize when further refinement is below rounding.
    """
    m = n // 2
    theta = (2.0 * np.arange(1, m + 1) - 1.0) * (np.pi / (2.0 * n))
    x = np.cos(theta)  # strictly inside (0, 1)

    def _vals(points):
        v = np.asarray(g(points), dtype=float)
        if v.ndim == 0:  # constant integrand returned a scalar
            v = np.full(points.shape, float(v))
        return v

    left, right = _vals(x), _vals(-x)
    total = float(np.sum(left + right))
    mass = float(np.sum(np.abs(left)) + np.sum(np.abs(right)))
    if n % 2:  # odd order has one node exactly at the origin
        mid = float(np.asarray(g(np.array([0.0])), dtype=float).reshape(-1)[0])
        total += mid
        mass += abs(mid)
    return (math.pi / n) * total, (math.pi / n) * mass


def integrate_chebyshev_weight(g: Callable, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Integrate g(x)/sqrt(1-x^2) over [-1, 1].

    ``g`` must accept a numpy array of interior points and should be
    continuous on [-1, 1]; it is never evaluated at the endpoints. The
    rule is exact for polynomials of degree < 2*order, and the order is
    doubled until successive estimates agree to ``spec.rel_tol`` -- or
    until they differ only at machine-rounding level relative to the
    integral of |g| (the attainable accuracy when the result is tiny
    through cancellation, e.g. nearly-odd integrands).

    Raises
    ------
    ConvergenceError
        If agreement is not reached by ``spec.max_order``; the exception
        carries the last two estimates.
    """
    floor = 32.0 * np.finfo(float).eps
    n = spec.order
    prev, _ = _chebyshev_estimate(g, n)
    err = math.inf
    while 2 * n <= spec.max_order:
        n *= 2
        cur, mass = _chebyshev_estimate(g, n)
        err = abs(cur - prev)
        if err <= spec.rel_tol * max(abs(cur), abs(prev)) or err <= floor * mass:
            return cur
        prev = cur
    raise ConvergenceError(
        f"quadrature did not settle by order {n} (last two estimates differ "
        f"by {err:.3e})",
        estimates=(prev, cur),
    )


def find_root_bracketed(f: Callable[[float], float], spec: RootSpec) -> float:
    """Locate a root of ``f`` inside [spec.lo, spec.hi].

    Brent-style iteration: inverse-quadratic / secant steps accepted only
    when they stay inside the current bracket and shrink it fast enough,
    bisection otherwise, so convergence is guaranteed. The result always
    lies inside the initial bracket and is converged once the bracket
    width falls below ``spec.abs_tol``.

    Raises
    ------
    BracketError
        If f(lo) and f(hi) have the same (nonzero) sign.
    ConvergenceError
        If ``spec.max_iter`` iterations do not shrink the bracket enough.
    """
    a, b = float(spec.lo), float(spec.hi)
    fa, fb = float(f(a)), float(f(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise BracketError(
            f"no sign change on [{spec.lo}, {spec.hi}]: f(lo)={fa:.6g}, f(hi)={fb:.6g}"
        )

    # c tracks the previous iterate; [b, c] (unordered) is the bracket.
    c, fc = a, fa
    d = e = b - a
    eps = np.finfo(float).eps
    for _ in range(spec.max_iter):
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * eps * abs(b) + 0.5 * spec.abs_tol
        mid = 0.5 * (c - b)
        if abs(mid) <= tol or fb == 0.0:
            return b
        if abs(e) < tol or abs(fa) <= abs(fb):
            d = e = mid  # bisect
        else:
            s = fb / fa
            if a == c:  # secant
                p = 2.0 * mid * s
                q = 1.0 - s
            else:  # inverse quadratic
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * mid * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * mid * q - abs(tol * q), abs(e * q)):
                e, d = d, p / q  # interpolation accepted
            else:
                d = e = mid
        a, fa = b, fb
        b += d if abs(d) > tol else math.copysign(tol, mid)
        fb = float(f(b))
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
    raise ConvergenceError(
        f"root not localized to {spec.abs_tol} within {spec.max_iter} iterations",
        bracket=(min(b, c), max(b, c)),
    )


def fixed_point_solve(map_fn: Callable, initial: Sequence, spec: FixedPointSpec) -> np.ndarray:
    """Solve v = map_fn(v) by damped iteration v <- (1-mixing) v + mixing map_fn(v).

    Convergence is declared when the largest componentwise change
    max|map_fn(v) - v| drops below ``spec.abs_tol``; the returned vector is
    the one that met this test (before the final mixing step). Components
    may be complex.

    Raises
    ------
    ConvergenceError
        After ``spec.max_iter`` iterations; carries the final residual and
        state so the caller can retry (e.g. with smaller mixing).
    """
    v = np.atleast_1d(np.asarray(initial))
    residual = math.inf
    for _ in range(spec.max_iter):
        w = np.atleast_1d(np.asarray(map_fn(v)))
        if w.shape != v.shape:
            raise ValueError(f"map returned shape {w.shape}, expected {v.shape}")
        residual = float(np.max(np.abs(w - v)))
        if residual < spec.abs_tol:
            return v
        v = (1.0 - spec.mixing) * v + spec.mixing * w
    raise ConvergenceError(
        f"fixed point not reached in {spec.max_iter} iterations "
        f"(residual {residual:.3e})",
        residual=residual,
        state=v,
    )
