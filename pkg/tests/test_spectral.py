import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sl2tilt.fusion import counts_at, path_count_tables, path_counts
from sl2tilt.spectral import (DegenerateRoot, PrecisionLoss, beta, coeff_from_residues,
                              coeff_scaled, coeff_scaled_mp, coeff_spectral, nearest_integer,
                              p_s_eval, p_s_eval_at_beta, p_s_prime, pn_prime, residues,
                              root_indices, roots)


def test_root_set_properties():
    for s in range(10):
        r = roots(s).roots
        assert len(r) == 2**s
        assert np.all(np.diff(r) < 0)
        assert np.all((r > 0) & (r < 4))
    assert roots(12).roots[0] > 3.9999


def test_p_s_eval_examples():
    assert p_s_eval(0, 3.5) == 1.5
    assert abs(p_s_eval(1, 2 + math.sqrt(2))) < 1e-12


@pytest.mark.parametrize("s", range(13))
def test_p_s_vanishes_on_roots(s):
    r = roots(s, dps=40).roots
    assert np.max(np.abs(p_s_eval(s, r))) <= 1e-10 * 4**s


def test_p_s_prime_examples():
    assert p_s_prime(1, 1) == pytest.approx(2 * math.sqrt(2), rel=1e-12)
    assert p_s_prime(0, 1) == pytest.approx(1.0)
    for s in range(1, 6):
        for j in range(1, 2**s + 1):
            assert math.copysign(1, p_s_prime(s, j)) == (-1) ** (j + 1)


@pytest.mark.parametrize("s", range(9))
def test_p_s_prime_finite_difference(s):
    for j in (1, 2**s // 2 + 1, 2**s):
        with mpmath.workdps(50):
            b = beta(s, 2 * j - 1, dps=50)
            h = mpmath.mpf(10) ** -12 * mpmath.mpf(4) ** -s
            fd = (p_s_eval(s, b + h) - p_s_eval(s, b - h)) / (2 * h)
        assert float(fd) == pytest.approx(p_s_prime(s, j), rel=1e-6)


def test_shared_root_identity():
    worst = 0.0
    for s in range(11):
        for sp in range(s + 1):
            for j in range(1, 2 ** (s + 1), 2):
                lhs = p_s_eval(sp, float(beta(s, j, dps=40)))
                worst = max(worst, abs(lhs - (beta(s - sp, j) - 2)))
                assert p_s_eval_at_beta(sp, s, j) == pytest.approx(beta(s - sp, j) - 2, abs=1e-14)
    assert worst <= 1e-10


def test_coeff_spectral_examples():
    assert coeff_spectral(0, 30) == 2**29
    assert round(coeff_spectral(1, 2)) == 1
    assert coeff_spectral(3, 20) == pytest.approx(path_counts(20)[8], rel=1e-9)
    with pytest.raises(ValueError):
        coeff_spectral(3, 7)
    with pytest.raises(PrecisionLoss):
        coeff_spectral(2, 600)


def test_coeff_spectral_extended_rounds_exactly():
    tables = path_count_tables(60)
    for s in range(7):
        for k in range(2**s, 61):
            assert nearest_integer(coeff_spectral(s, k, dps=60)) == tables[k][2**s]


def test_coeff_scaled_examples():
    assert coeff_scaled(0, 3) == pytest.approx(0.0625, rel=1e-15)
    assert coeff_scaled(1, 2) == pytest.approx(1 / 16, rel=1e-15)
    assert coeff_scaled(3, 5) == 0.0


@pytest.mark.parametrize("s", range(5))
def test_scaled_mass_is_half(s):
    ks = np.arange(0, 60 * 4**s + 200)
    assert math.fsum(coeff_scaled(s, ks)) == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 6), st.integers(0, 300))
def test_precise_scaled_matches_dp(s, dk):
    k = 2**s + dk
    exact = counts_at([2**s], k)[2**s][k]
    assert coeff_scaled(s, k, precise=True) == pytest.approx(exact / 4**k, rel=1e-9)
    mp = coeff_scaled_mp(s, k)
    assert abs(mp * 4**k / exact - 1) < 1e-15


def test_residue_examples():
    (r, res), = residues(1)
    assert r == pytest.approx(2.0) and res == pytest.approx(1.0)
    assert sorted(b for b, _ in residues(2)) == pytest.approx([2 - math.sqrt(2), 2 + math.sqrt(2)])


def test_root_indices_cover_all_levels():
    # n = 6 = 4 + 2: roots of P_2 (odd j) and of P_1 (j = 2 mod 4)
    assert [j for j, _ in root_indices(6)] == [1, 2, 3, 5, 6, 7]
    with pytest.raises(ValueError):
        pn_prime(6, 4)


def test_residue_sums_reproduce_counts():
    tables = path_count_tables(200)
    worst = 0.0
    for n in range(1, 16):
        for k in range(n, 201, 7):
            v = coeff_from_residues(n, k, dps=30)
            worst = max(worst, float(abs(v / tables[k][n] - 1)))
    assert worst <= 1e-9


def test_residue_sums_double_precision_small_n():
    tables = path_count_tables(120)
    for n in range(1, 9):
        for k in range(n, 121, 5):
            assert coeff_from_residues(n, k) == pytest.approx(tables[k][n], rel=1e-9)


def test_residue_below_n_is_zero():
    assert coeff_from_residues(5, 3) == 0.0


def test_degenerate_root_is_an_error_type():
    assert issubclass(DegenerateRoot, ArithmeticError)


def test_nearest_integer_keeps_bits():
    with mpmath.workdps(40):
        v = mpmath.mpf(2) ** 80 + 1 + mpmath.mpf("0.4")
    assert nearest_integer(v) == 2**80 + 1
