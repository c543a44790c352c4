import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from sl2tilt.theta import (SWITCH, ThetaEvaluator, UnsupportedOrder, dirichlet_chi, fe_residual,
                           integral_partial_sums, laplace, paired_term_ratio, phi, phi_derivative,
                           phi_integral, phi_series, phi_vec, termwise_integral)

C = math.pi**2 / 16


def test_character_values():
    assert [dirichlet_chi(n) for n in range(8)] == [0, 1, 0, -1, 0, 1, 0, -1]


def test_phi_examples():
    assert phi(-1) == 0.0 and phi(0) == 0.0
    oracle = math.pi / 8 * (math.exp(-C) - 3 * math.exp(-9 * C) + 5 * math.exp(-25 * C))
    assert phi(1.0) == pytest.approx(oracle, abs=1e-6)


def test_branches_meet_at_switch_point():
    x = SWITCH
    assert 8 * (math.pi * x) ** -1.5 == pytest.approx(1.0, rel=1e-15)
    series = ThetaEvaluator(switch=0.0)
    inverted = ThetaEvaluator(switch=math.inf)
    assert series.phi(x) == pytest.approx(inverted.phi(x), rel=1e-14)


def test_both_paths_agree_on_one_to_four():
    series, inverted = ThetaEvaluator(switch=0.0), ThetaEvaluator(switch=math.inf)
    for x in np.linspace(1, 4, 61):
        assert series.phi(x) == pytest.approx(inverted.phi(x), rel=1e-12)


def test_against_extended_precision_series():
    for x in np.geomspace(0.05, 50, 40):
        ref = phi_series(float(x), dps=50)
        assert phi(float(x)) == pytest.approx(float(ref), rel=1e-12)


def test_functional_equation_log_grid():
    xs = np.geomspace(0.01, 100, 200)
    assert max(fe_residual(float(x)) for x in xs) <= 1e-12
    assert all(phi(float(x)) > 0 for x in xs)


@given(st.floats(SWITCH, 50.0))
def test_paired_terms_decrease_past_switch(x):
    for m in range(5):
        r = paired_term_ratio(x, m)
        assert r <= 3 * math.exp(-math.pi**2 * x / 2) <= 3 * math.exp(-2 * math.pi) < 1


def test_rapid_decay_at_zero():
    # double precision underflows below 1e-2, so follow the inversion in mpmath
    with mpmath.workdps(30):
        vals = []
        for e in range(1, 5):
            x = mpmath.mpf(10) ** -e
            vals.append(8 * (mpmath.pi * x) ** -1.5 * phi_series(16 / (mpmath.pi**2 * x), dps=30) / x**6)
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < mpmath.mpf(10) ** -1000
    assert phi(0.1) * 1e6 == pytest.approx(float(vals[0]), rel=1e-10)


def test_vectorised_matches_scalar():
    xs = np.concatenate([[-1.0, 0.0], np.geomspace(1e-3, 80, 300)])
    ref = np.array([phi(float(x)) for x in xs])
    normal = (ref == 0) | (ref > 1e-300)
    assert np.allclose(phi_vec(xs)[normal], ref[normal], rtol=1e-13, atol=0)


def test_derivative_examples():
    assert phi_derivative(2.5, 0) == phi(2.5)
    assert phi_derivative(3.0, 1) < 0
    h = 1e-5
    fd = (phi(2 + h) - phi(2 - h)) / (2 * h)
    assert phi_derivative(2.0, 1) == pytest.approx(fd, abs=1e-7)
    with pytest.raises(UnsupportedOrder):
        phi_derivative(1.0, 7)


@pytest.mark.parametrize("p", range(1, 7))
@pytest.mark.parametrize("x", [0.3, 0.8, 1.5, 3.0])
def test_derivatives_by_extended_finite_differences(p, x):
    # mpmath differentiates the series numerically at high precision
    with mpmath.workdps(40):
        ref = mpmath.diff(lambda t: phi_series(t, dps=mpmath.mp.dps), mpmath.mpf(x), p)
    assert phi_derivative(x, p) == pytest.approx(float(ref), rel=1e-9)


def test_integral_is_half():
    assert phi_integral() == pytest.approx(0.5, abs=1e-8)


def test_termwise_integral():
    for n in range(1, 30):
        assert termwise_integral(n) == pytest.approx(math.pi / 8 * dirichlet_chi(n) * n * 16 / (math.pi**2 * n * n))
    sums = integral_partial_sums(401)
    above = [v > 0.5 for v in sums]
    assert all(a != b for a, b in zip(above, above[1:]))
    assert abs(sums[-1] - 0.5) < 2 / (math.pi * 401)


@pytest.mark.parametrize("lam", [0.05, 0.5, 2.0, 10.0])
def test_laplace_transform(lam):
    num = integrate.quad(lambda x: math.exp(-lam * x) * phi(x), 0, 60, limit=200, epsabs=1e-13)[0]
    assert laplace(lam).real == pytest.approx(num, rel=1e-9)
    assert laplace(lam).real == pytest.approx(0.5 / math.cosh(2 * math.sqrt(lam)), rel=1e-12)


def test_laplace_on_imaginary_axis_matches_fourier():
    xi = 1.7
    re = integrate.quad(lambda x: math.cos(xi * x) * phi(x), 0, 60, limit=400, epsabs=1e-13)[0]
    im = -integrate.quad(lambda x: math.sin(xi * x) * phi(x), 0, 60, limit=400, epsabs=1e-13)[0]
    assert complex(laplace(1j * xi)) == pytest.approx(complex(re, im), abs=1e-10)
