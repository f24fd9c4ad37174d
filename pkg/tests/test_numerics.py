import math

import numpy as np
import pytest

from spinent.numerics import (
    BracketError,
    ConvergenceError,
    FixedPointSpec,
    QuadratureSpec,
    RootSpec,
    find_root_bracketed,
    fixed_point_solve,
    integrate_chebyshev_weight,
)


# ------------------------------------------------------------- quadrature

def test_chebyshev_weight_normalization():
    assert integrate_chebyshev_weight(lambda x: np.ones_like(x)) == pytest.approx(math.pi, abs=1e-14)


def test_chebyshev_odd_integrand_is_exactly_zero():
    # nodes are mirrored pairs, so the first moment cancels in floating point
    assert integrate_chebyshev_weight(lambda x: x) == 0.0
    # general odd integrands only cancel up to g's own evaluation rounding
    assert integrate_chebyshev_weight(lambda x: x**3 - 2.0 * x) == pytest.approx(0.0, abs=1e-14)


def test_chebyshev_second_moment():
    assert integrate_chebyshev_weight(lambda x: x * x) == pytest.approx(math.pi / 2, abs=1e-14)


def test_chebyshev_scalar_integrand_accepted():
    assert integrate_chebyshev_weight(lambda x: 1.0) == pytest.approx(math.pi, abs=1e-14)


def test_chebyshev_polynomial_exactness():
    # exact moments: int x^{2m} / sqrt(1-x^2) dx = pi * (2m-1)!! / (2m)!!
    def moment(m):
        val = math.pi
        for i in range(1, m + 1):
            val *= (2 * i - 1) / (2 * i)
        return val

    rng = np.random.default_rng(7)
    spec = QuadratureSpec(order=32)
    for _ in range(20):
        coeffs = rng.uniform(-2, 2, size=12)  # degree 11 < 2 * order
        exact = sum(c * moment(k // 2) for k, c in enumerate(coeffs) if k % 2 == 0)
        val = integrate_chebyshev_weight(lambda x: np.polynomial.polynomial.polyval(x, coeffs), spec)
        assert val == pytest.approx(exact, abs=1e-12)


def test_chebyshev_smooth_nonpolynomial():
    # int exp(x)/sqrt(1-x^2) = pi * I_0(1)
    from scipy.special import i0

    assert integrate_chebyshev_weight(np.exp) == pytest.approx(math.pi * i0(1.0), rel=1e-13)


def test_chebyshev_nonconvergence_carries_estimates():
    spec = QuadratureSpec(order=8, max_order=16, rel_tol=1e-15)
    with pytest.raises(ConvergenceError) as info:
        integrate_chebyshev_weight(lambda x: np.exp(-2000.0 * x * x), spec)
    assert info.value.estimates is not None
    assert len(info.value.estimates) == 2


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(order=4)
    with pytest.raises(ValueError):
        QuadratureSpec(order=64, max_order=32)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)


# ----------------------------------------------------------- root finding

def test_root_sqrt2():
    spec = RootSpec(lo=1.0, hi=2.0, abs_tol=1e-12)
    assert find_root_bracketed(lambda x: x * x - 2.0, spec) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_root_cosine():
    spec = RootSpec(lo=1.0, hi=2.0, abs_tol=1e-12)
    assert find_root_bracketed(math.cos, spec) == pytest.approx(math.pi / 2, abs=1e-12)


def test_root_linear():
    spec = RootSpec(lo=0.0, hi=10.0, abs_tol=1e-12)
    assert find_root_bracketed(lambda x: 3.0 * x - 6.0, spec) == pytest.approx(2.0, abs=1e-12)


def test_root_stays_inside_bracket():
    rng = np.random.default_rng(3)
    for _ in range(25):
        r = rng.uniform(-1.0, 1.0)
        lo, hi = r - rng.uniform(0.1, 2.0), r + rng.uniform(0.1, 2.0)
        f = lambda x, r=r: (x - r) * (1.0 + 0.5 * math.sin(3.0 * x))
        x = find_root_bracketed(f, RootSpec(lo=lo, hi=hi, abs_tol=1e-11))
        assert lo <= x <= hi
        assert x == pytest.approx(r, abs=1e-10)


def test_root_no_sign_change_raises():
    with pytest.raises(BracketError):
        find_root_bracketed(lambda x: x * x + 1.0, RootSpec(lo=-1.0, hi=1.0))


def test_root_endpoint_root_returned():
    assert find_root_bracketed(lambda x: x, RootSpec(lo=0.0, hi=1.0)) == 0.0


def test_root_max_iter_exceeded():
    spec = RootSpec(lo=1.0, hi=2.0, abs_tol=1e-14, max_iter=1)
    with pytest.raises(ConvergenceError):
        find_root_bracketed(lambda x: x * x - 2.0, spec)


def test_root_spec_validation():
    with pytest.raises(ValueError):
        RootSpec(lo=2.0, hi=1.0)
    with pytest.raises(ValueError):
        RootSpec(lo=0.0, hi=1.0, abs_tol=-1.0)


# ------------------------------------------------------------ fixed point

def test_fixed_point_linear_contraction():
    v = fixed_point_solve(lambda x: 0.5 * x + 1.0, [0.0], FixedPointSpec(abs_tol=1e-12))
    assert v[0] == pytest.approx(2.0, abs=1e-11)


def test_fixed_point_identity_returns_immediately():
    calls = []

    def ident(v):
        calls.append(1)
        return v

    v0 = np.array([1.0, -2.0, 3.5])
    v = fixed_point_solve(ident, v0, FixedPointSpec())
    assert np.array_equal(v, v0)
    assert len(calls) == 1


def test_fixed_point_divergent_map_raises():
    with pytest.raises(ConvergenceError) as info:
        fixed_point_solve(lambda x: 2.0 * x + 1.0, [1.0], FixedPointSpec(max_iter=10))
    assert info.value.residual > 0.0
    assert info.value.state is not None


def test_fixed_point_residual_monotone_for_affine_contraction():
    a = np.array([[0.5, 0.1], [0.0, 0.3]])
    b = np.array([1.0, -0.5])
    residuals = []

    def affine(v):
        w = a @ v + b
        residuals.append(float(np.max(np.abs(w - v))))
        return w

    fixed_point_solve(affine, [10.0, 10.0], FixedPointSpec(abs_tol=1e-12, max_iter=400))
    assert all(r2 <= r1 + 1e-15 for r1, r2 in zip(residuals, residuals[1:]))


def test_fixed_point_complex_components():
    v = fixed_point_solve(lambda x: 0.5 * x + 1.0j, [0.0j], FixedPointSpec(abs_tol=1e-12))
    assert v[0] == pytest.approx(2.0j, abs=1e-11)


def test_fixed_point_spec_validation():
    with pytest.raises(ValueError):
        FixedPointSpec(mixing=0.0)
    with pytest.raises(ValueError):
        FixedPointSpec(mixing=1.5)
