from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from darboux_conn.companion import build_companion
from darboux_conn.curve import make_curve
from darboux_conn.errors import InvalidSpectralData
from darboux_conn.spectral import (
    ResidueParams,
    check_genericity,
    check_polar_spectrum,
    irregular_spectrum,
    logarithmic_spectrum,
    polar_forms,
    solve_residue_params,
)
from conftest import sample_config

S6 = np.sqrt(6)


def exact_log_params(p1, p2, q1, q2):
    """Solve the two 2x2 systems in exact arithmetic, returning coefficients of s**2, s, s, 1."""
    p1, p2, q1, q2 = map(Fraction, (p1, p2, q1, q2))
    return -(p1 + p2) / 2, -(p1 - p2) / 2, (q1 - q2) / 2, (q1 + q2) / 2


def test_genericity_pass():
    data = logarithmic_spectrum(make_curve(2), 3, S6, (0.25, -0.25), (-1 / 3, -2 / 3))
    report = check_genericity(data)
    assert report.passed
    assert report.checks["fuchs"]["distance"] < 1e-15


def test_genericity_integer_difference_fails():
    with pytest.raises(InvalidSpectralData, match="theta2_difference"):
        logarithmic_spectrum(make_curve(2), 3, S6, (0.5, -0.5), (0, -1))


def test_genericity_fuchs_fails():
    with pytest.raises(InvalidSpectralData, match="fuchs"):
        logarithmic_spectrum(make_curve(2), 3, S6, (0.25, -0.25), (1 / 3, -1 / 3))


def test_logarithmic_needs_generic_t():
    with pytest.raises(InvalidSpectralData):
        logarithmic_spectrum(make_curve(2), 1, 0, (0.25, -0.25), (-1 / 3, -2 / 3))


def test_logarithmic_params_frozen(lam2, log_data):
    s = log_data.s
    c1, c2, c3, c4 = exact_log_params(Fraction(-1, 16), Fraction(2, 9), 0, -1)
    assert (c1, c2, c3, c4) == (Fraction(-23, 288), Fraction(41, 288), Fraction(1, 2), Fraction(-1, 2))
    p = solve_residue_params(lam2, log_data)
    assert abs(p.a1 - (-23 * s * s / 288)) < 1e-14
    assert abs(p.a2 - 41 * s / 288) < 1e-14
    assert abs(p.b1 - s / 2) < 1e-14
    assert abs(p.b2 + 0.5) < 1e-15


def test_logarithmic_params_reproduce_exponents(lam2, log_data):
    p = solve_residue_params(lam2, log_data)
    check = check_polar_spectrum(lam2, log_data, polar_forms(lam2, log_data, p))
    assert check.passed and check.max_error < 1e-12


def test_flipped_signs_fail_eigenvalue_check(lam2, log_data):
    s = log_data.s
    flipped = ResidueParams(23 * s * s / 288, -41 * s / 288, -s / 2, 0.5)
    check = check_polar_spectrum(lam2, log_data, polar_forms(lam2, log_data, flipped))
    assert not check.passed
    assert check.max_error > 0.1


def test_equal_products_give_zero_a2(lam2):
    # theta2 solves x**2 + 0.9 x - 0.06 = 0, so both pairs have product -0.06
    root = np.sqrt(0.81 + 0.24)
    data = logarithmic_spectrum(lam2, 3, S6, (0.2, -0.3), ((-0.9 + root) / 2, (-0.9 - root) / 2))
    assert abs(data.theta1_plus * data.theta1_minus - data.theta2_plus * data.theta2_minus) < 1e-15
    assert abs(solve_residue_params(lam2, data).a2) < 1e-15


@pytest.mark.parametrize("root", ["0", "1", "lambda"])
def test_irregular_exponents(root):
    curve = make_curve(2.5 + 0.5j)
    data = irregular_spectrum(curve, root, (0.3 + 0.1j, -0.4), 0.2 - 0.3j)
    p = solve_residue_params(curve, data)
    assert p.b2 == -0.5
    check = check_polar_spectrum(curve, data, polar_forms(curve, data, p))
    assert check.passed, check
    assert check.max_error < 1e-8


def test_irregular_at_infinity_unsupported(lam2):
    with pytest.raises(InvalidSpectralData, match="x -> 1/x"):
        irregular_spectrum(lam2, "infty", (0.3, -0.4), 0.2)


def test_irregular_needs_distinct_leading(lam2):
    with pytest.raises(InvalidSpectralData):
        irregular_spectrum(lam2, "0", (0.3, 0.3), 0.2)


def test_irregular_theta_m1_fuchs(irr_data):
    assert irr_data.theta_m1_plus + irr_data.theta_m1_minus == -1


exponent = st.builds(complex, st.floats(-0.45, 0.45), st.floats(-0.3, 0.3))


@given(exponent, exponent, exponent)
def test_logarithmic_exponents_property(a, b, c):
    curve = make_curve(2.5 + 0.5j)
    theta1 = (a, b)
    theta2 = (c, -1 - a - b - c)
    try:
        data = logarithmic_spectrum(curve, 0.7 - 1.2j, np.sqrt(curve.K(0.7 - 1.2j)), theta1, theta2)
    except InvalidSpectralData:
        return
    p = solve_residue_params(curve, data)
    assert check_polar_spectrum(curve, data, polar_forms(curve, data, p)).passed


def test_params_independent_of_apparent_data(lam2, log_data):
    first = build_companion(lam2, log_data, sample_config(lam2, log_data))
    other = [(0.9 - 0.6j, 1.2), (-0.4 + 1.3j, 0.3j), (1.7 + 0.9j, -0.8)]
    second = build_companion(lam2, log_data, sample_config(lam2, log_data, other))
    assert first.params == second.params
