import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from sl2tilt.limitfn import (DELTA, SCALE, DomainTooSmall, Grid, GridMismatch, NotConverged,
                             PsiModel, SampledDensity, UnderResolved, a_vs_phi_diagnostic,
                             build_psi, convolve, omega, psi, reduce_to_unit_period,
                             sample_phi_s, scaling_residual)
from sl2tilt.theta import phi, phi_vec


def test_delta_constant():
    assert DELTA == pytest.approx(0.70751874963942, abs=1e-14)
    assert SCALE * 4**DELTA == pytest.approx(1.0, rel=1e-15)


def test_sample_mass_and_definition():
    d = sample_phi_s(0, Grid(h=2**-10, domain=60))
    assert d.mass == pytest.approx(0.5, abs=1e-6)
    d1 = sample_phi_s(1, Grid(h=2**-8, domain=200))
    i = 4 * 2**8  # x = 4
    assert d1.values[i] == pytest.approx(phi(1.0) / 4, rel=1e-14)


def test_peak_scales_with_level():
    peaks = []
    for s in range(3):
        d = sample_phi_s(s, Grid(h=2**-8, domain=4.0**s * 8))
        peaks.append(d.x[np.argmax(d.values)])
    assert peaks[1] / peaks[0] == pytest.approx(4, rel=1e-2)
    assert peaks[2] / peaks[1] == pytest.approx(4, rel=1e-2)


def test_under_resolved():
    with pytest.raises(UnderResolved):
        sample_phi_s(-3, Grid(h=2**-6, domain=4))


def _density(rng, n, h):
    return SampledDensity(0.0, h, rng.random(n))


def test_convolution_mass_and_sup():
    rng = np.random.default_rng(1)
    a, b = _density(rng, 500, 0.01), _density(rng, 300, 0.01)
    c = convolve(a, b)
    assert c.mass == pytest.approx(a.mass * b.mass, rel=1e-9)
    assert c.sup <= min(a.mass * b.sup, a.sup * b.mass) * (1 + 1e-12)
    ref = np.convolve(a.values, b.values) * 0.01
    assert np.allclose(c.values, ref, rtol=1e-10, atol=1e-14)


def test_convolution_identity_and_mismatch():
    rng = np.random.default_rng(2)
    a = _density(rng, 200, 0.125)
    unit = SampledDensity(0.0, 0.125, [8.0])
    assert np.allclose(convolve(a, unit).values, a.values, rtol=1e-12, atol=1e-15)
    with pytest.raises(GridMismatch):
        convolve(a, SampledDensity(0.0, 0.25, [1.0]))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 200), st.integers(1, 200), st.integers(0, 2**32 - 1))
def test_convolution_mass_property(n, m, seed):
    rng = np.random.default_rng(seed)
    a, b = _density(rng, n, 0.03), _density(rng, m, 0.03)
    c = convolve(a, b)
    assert c.mass == pytest.approx(a.mass * b.mass, rel=1e-9)
    assert np.all(c.values >= 0)


def test_single_level_window_is_phi():
    g = Grid(h=2**-10, domain=6)
    approx = build_psi(0, 0, g)
    assert np.allclose(approx.density.values, phi_vec(g.points()), atol=1e-14, rtol=1e-12)


def test_two_levels_is_subset_sum():
    g = Grid(h=2**-9, domain=8)
    approx = build_psi(0, 1, g)
    f0, f1 = sample_phi_s(0, g), sample_phi_s(1, g)
    cross = convolve(f0, f1).values[:g.length]
    assert np.allclose(approx.density.values, f0.values + f1.values + cross, atol=1e-13)


def test_analytic_tail_matches_sampled_levels():
    # all levels sampled on a fine grid against the Fourier tail on a coarse one
    fine = build_psi(5, 1, Grid(h=2**-14, domain=6))
    coarse = build_psi(5, 1, Grid(h=2**-10, domain=6))
    assert coarse.analytic_levels == (-5, -4) and not fine.analytic_levels
    x = np.linspace(1, 4, 31)
    assert np.allclose(coarse.raw(x), fine.raw(x), rtol=1e-5, atol=0)
    with pytest.raises(UnderResolved):
        build_psi(5, 1, Grid(h=2**-10, domain=6), fine_tail="strict")


def test_domain_checks():
    with pytest.raises(DomainTooSmall):
        build_psi(1, 1, Grid(h=2**-8, domain=3))
    small = build_psi(1, 1, Grid(h=2**-8, domain=5))
    with pytest.raises(DomainTooSmall):
        scaling_residual(small)


@given(st.floats(1e-6, 1e9))
def test_period_reduction_exact(x):
    m, y = reduce_to_unit_period(x)
    assert 1 <= y < 4
    assert math.ldexp(float(y), 2 * int(m)) == x


def test_psi_scaling_and_positivity(psi_model):
    x = np.linspace(1, 4, 97)
    p = psi_model.predict(x)
    assert np.all(p > 0)
    assert np.allclose(psi_model.predict(4 * x) / p, 0.375, rtol=1e-12)
    assert np.allclose(psi_model.predict(16 * x), SCALE**2 * p, rtol=1e-12)
    assert psi_model.scaling_residual_ <= 1e-4
    raw = psi_model.approx_.raw
    assert np.max(np.abs(raw(4 * x) / raw(x) - 0.375)) / 0.375 <= 1e-4


def test_omega_periodic_and_positive(psi_model):
    x = np.geomspace(0.5, 500, 50)
    w = omega(x, psi_model)
    assert np.all(w > 0)
    assert np.allclose(omega(4 * x, psi_model), w, rtol=1e-5)


def test_module_level_helpers(psi_model):
    assert psi(2.0) == pytest.approx(psi_model.predict([2.0])[0])
    assert omega(2.0) == pytest.approx(psi(2.0) * 2**DELTA)


def test_estimator_protocol():
    m = PsiModel(r1=5, r2=2, h=2**-10, domain=17)
    assert m.get_params()["r1"] == 5
    c = clone(m).set_params(r1=6)
    assert c.r1 == 6 and m.r1 == 5
    with pytest.raises(Exception):
        m.predict([1.0])
    with pytest.raises(NotConverged):
        PsiModel(r1=1, r2=1, h=2**-8, domain=17, tol=1e-12).fit()


def test_build_is_nonnegative_and_finite(psi_model):
    v = psi_model.approx_.density.values
    assert np.all(np.isfinite(v)) and np.all(v >= 0)


def test_a_vs_phi_small_levels():
    rep = a_vs_phi_diagnostic(range(3, 7))
    e = [rep.errors[s] for s in range(3, 7)]
    assert all(b < a for a, b in zip(e, e[1:]))
    assert max(rep.scaled8.values()) <= 2 * rep.scaled8[3]
    assert max(rep.tail_bound.values()) < 10
