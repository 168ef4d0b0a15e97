from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from darboux_conn.errors import NearSingular, NonFiniteValue, SeriesError
from darboux_conn.numeric import (
    LaurentSeries,
    LinearSystem,
    convergence_order,
    determinant,
    residue,
    richardson_extrapolate,
    series_derivative,
    series_inverse,
    series_mul,
    series_sqrt,
    solve_linear,
)
from oracles import GaussQ, convolve_truncated, exact_cramer, newton_sqrt, random_gauss

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def unit_series(lowest=0, n=8, tail=cplx):
    """Series with a leading coefficient bounded away from zero."""
    lead = st.builds(complex, st.floats(0.5, 2), st.floats(-1, 1))
    return st.builds(lambda c0, rest: LaurentSeries(lowest, [c0] + rest, trim=False),
                     lead, st.lists(tail, min_size=n - 1, max_size=n - 1))


# tail no larger than the leading term, so reciprocal coefficients stay O(1)
tame = st.builds(complex, st.floats(-0.35, 0.35), st.floats(-0.35, 0.35))


def dense(s, start, stop):
    return s.dense(start, stop)


# --- construction ---------------------------------------------------------

def test_length_invariant():
    s = LaurentSeries(-2, [1, 2, 3, 4])
    assert s.truncation_order == 1
    assert s.coefficients.shape[0] == s.truncation_order - s.lowest_order + 1


def test_trim_drops_negligible_leading_terms():
    s = LaurentSeries(-2, [1e-16, 0, 1.0, 2.0])
    assert s.lowest_order == 0
    assert s.truncation_order == 1


def test_zero_series_is_empty():
    z = LaurentSeries(0, [0, 0, 0])
    assert z.is_zero
    assert z.truncation_order == 2


def test_nonfinite_rejected():
    with pytest.raises(NonFiniteValue):
        LaurentSeries(0, [1.0, float("nan")])


def test_coefficient_beyond_window_raises():
    with pytest.raises(SeriesError):
        LaurentSeries(0, [1, 2]).coefficient(5)


# --- series_mul -----------------------------------------------------------

def test_mul_inverse_pair():
    z = LaurentSeries.monomial(1, truncation_order=6)
    zi = LaurentSeries.monomial(-1, truncation_order=4)
    prod = series_mul(zi, z)
    assert prod.lowest_order == 0
    assert np.allclose(prod.dense(0, prod.truncation_order), [1] + [0] * prod.truncation_order)


def test_mul_difference_of_squares():
    a = LaurentSeries(0, [1, 1, 0, 0, 0])
    b = LaurentSeries(0, [1, -1, 0, 0, 0])
    assert np.allclose(series_mul(a, b).dense(0, 4), [1, 0, -1, 0, 0])


def test_mul_matches_convolution_oracle():
    rng = np.random.default_rng(11)
    a = rng.normal(size=5) + 1j * rng.normal(size=5)
    b = rng.normal(size=5) + 1j * rng.normal(size=5)
    a[0] += 3
    b[0] += 3
    got = series_mul(LaurentSeries(0, a), LaurentSeries(0, b)).dense(0, 4)
    assert np.max(np.abs(got - convolve_truncated(a, b, 5))) < 1e-14


def test_mul_orders_add():
    a = LaurentSeries(-2, [1, 2, 3, 4, 5])
    b = LaurentSeries(3, [2, 1, 1, 1])
    prod = series_mul(a, b)
    assert prod.lowest_order == 1
    assert prod.truncation_order == min(-2 + 6, 3 + 2)


@given(unit_series(-1), unit_series(0), unit_series(2))
def test_mul_associative(a, b, c):
    left = series_mul(series_mul(a, b), c)
    right = series_mul(a, series_mul(b, c))
    top = min(left.truncation_order, right.truncation_order)
    scale = max(1.0, np.max(np.abs(left.coefficients)))
    assert np.max(np.abs(dense(left, 1, top) - dense(right, 1, top))) < 1e-13 * scale


@given(unit_series(-1), unit_series(1))
def test_mul_commutative(a, b):
    ab, ba = series_mul(a, b), series_mul(b, a)
    assert ab.truncation_order == ba.truncation_order
    assert np.max(np.abs(dense(ab, 0, ab.truncation_order) - dense(ba, 0, ba.truncation_order))) < 1e-13


# --- series_inverse -------------------------------------------------------

def test_inverse_of_one():
    inv = series_inverse(LaurentSeries(0, [1, 0, 0, 0]))
    assert np.allclose(inv.dense(0, 3), [1, 0, 0, 0])


def test_inverse_of_monomial():
    inv = series_inverse(LaurentSeries(1, [1, 0, 0]))
    assert inv.lowest_order == -1
    assert np.allclose(inv.dense(-1, 1), [1, 0, 0])


def test_inverse_geometric_series():
    inv = series_inverse(LaurentSeries(0, [1, 1, 0, 0, 0, 0]))
    assert np.allclose(inv.dense(0, 5), [1, -1, 1, -1, 1, -1])


def test_inverse_of_zero_leading_raises():
    with pytest.raises(SeriesError):
        series_inverse(LaurentSeries.zero(3))


@given(unit_series(-2, 10, tame))
def test_inverse_involution(a):
    back = series_inverse(series_inverse(a))
    assert back.lowest_order == a.lowest_order
    top = min(back.truncation_order, a.truncation_order)
    err = np.max(np.abs(dense(back, a.lowest_order, top) - dense(a, a.lowest_order, top)))
    assert err < 1e-12 * max(1.0, np.max(np.abs(a.coefficients)))


# --- series_sqrt ----------------------------------------------------------

def test_sqrt_of_one():
    assert np.allclose(series_sqrt(LaurentSeries(0, [1, 0, 0]), 1).dense(0, 2), [1, 0, 0])


def test_sqrt_binomial():
    r = series_sqrt(LaurentSeries(0, [1, 2, 0, 0, 0]), 1)
    assert np.allclose(r.dense(0, 4), [1, 1, -0.5, 0.5, -0.625])


def test_sqrt_negative_branch():
    r = series_sqrt(LaurentSeries(0, [4, 1, 0, 0, 0, 0]), -2)
    # binomial expansion of -2 (1 + z/4)^(1/2)
    assert np.allclose(r.dense(0, 3), [-2, -0.25, 1 / 64, -1 / 512], atol=1e-15)
    assert np.max(np.abs(r.dense(0, 5) - newton_sqrt([4, 1, 0, 0, 0, 0], -2, 6))) < 1e-14
    sq = series_mul(r, r)
    assert np.allclose(sq.dense(0, 5), [4, 1, 0, 0, 0, 0], atol=1e-14)


def test_sqrt_rejects_wrong_branch():
    with pytest.raises(SeriesError):
        series_sqrt(LaurentSeries(0, [4, 1]), 3)


def test_sqrt_rejects_odd_order():
    with pytest.raises(SeriesError):
        series_sqrt(LaurentSeries(1, [1, 1]), 1)


@given(unit_series(0, 8))
def test_sqrt_matches_newton_oracle(a):
    b0 = np.sqrt(a.coefficients[0])
    got = series_sqrt(a, b0).dense(0, 7)
    want = newton_sqrt(a.coefficients, b0, 8)
    assert np.max(np.abs(got - want)) < 1e-9 * max(1.0, np.max(np.abs(want)))


# --- residue --------------------------------------------------------------

def test_residue_examples():
    assert residue(LaurentSeries(-1, [1, 0, 0])) == 1
    assert residue(LaurentSeries(0, [1, 1, 0])) == 0
    assert residue(LaurentSeries(-2, [3, 5, 0])) == 5


def test_residue_needs_order_minus_one():
    with pytest.raises(SeriesError):
        residue(LaurentSeries(-4, [1, 1]))


@given(st.lists(cplx, min_size=8, max_size=8))
def test_dlog_residue_at_simple_zero(tail):
    f = LaurentSeries(1, [1.0] + tail, trim=False)
    dlog = series_mul(series_derivative(f), series_inverse(f))
    assert abs(residue(dlog) - 1) < 1e-12


# --- linear systems -------------------------------------------------------

def test_solve_identity():
    x = solve_linear(LinearSystem(np.eye(3), np.array([1, 2, 3])))
    assert np.allclose(x, [1, 2, 3])


def test_solve_diagonal():
    x = solve_linear(LinearSystem(np.diag([2, 4]), np.array([2, 4])))
    assert np.allclose(x, [1, 1])


def test_solve_frozen_instance():
    m = [[GaussQ(2, 1), GaussQ(-1), GaussQ(0, 3)],
         [GaussQ(1, Fraction(1, 2)), GaussQ(4), GaussQ(1, -1)],
         [GaussQ(0), GaussQ(Fraction(-2, 3), 1), GaussQ(5)]]
    b = [GaussQ(1), GaussQ(0, 1), GaussQ(-2, 2)]
    want = np.array([complex(v) for v in exact_cramer(m, b)])
    got = solve_linear(LinearSystem(np.array([[complex(v) for v in r] for r in m]),
                                    np.array([complex(v) for v in b])))
    assert np.max(np.abs(got - want)) < 1e-12


def test_solve_matches_exact_cramer_oracle():
    rng = np.random.default_rng(5)
    done = 0
    while done < 50:
        m = [[random_gauss(rng) for _ in range(3)] for _ in range(3)]
        b = [random_gauss(rng) for _ in range(3)]
        mf = np.array([[complex(v) for v in r] for r in m])
        if np.linalg.cond(mf) > 1e3:
            continue
        want = np.array([complex(v) for v in exact_cramer(m, b)])
        got = solve_linear(LinearSystem(mf, np.array([complex(v) for v in b])))
        assert np.max(np.abs(got - want)) < 1e-12 * max(1.0, np.max(np.abs(want)))
        done += 1


def test_singular_system_raises():
    with pytest.raises(NearSingular):
        solve_linear(LinearSystem(np.array([[1, 2], [2, 4]]), np.array([1, 1])))


def test_threshold_tie_raises():
    m = np.array([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(NearSingular):
        solve_linear(LinearSystem(m, np.array([1, 1])), threshold=1.0)


def test_determinant_cofactor():
    assert determinant(np.array([[1, 2], [3, 4]])) == -2
    assert determinant(np.array([[1, 1, 0], [1, 2, 0], [1, 3, 1]])) == 1


# --- extrapolation --------------------------------------------------------

def test_richardson_removes_quadratic_error():
    steps = (1e-2, 1e-3)
    values = [1.0 + 3 * h * h for h in steps]
    assert abs(richardson_extrapolate(values, steps, order=2) - 1.0) < 1e-14


def test_convergence_order_quadratic():
    steps = (1e-2, 1e-3)
    assert abs(convergence_order([2 * h * h for h in steps], steps) - 2) < 1e-10
