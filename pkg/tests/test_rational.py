from __future__ import annotations

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from darboux_conn.numeric import LaurentSeries
from darboux_conn.rational import Rational, rational_sum, taylor_shift

small = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))
centers = st.sampled_from([0.5 + 0.5j, -1.0, 2.0 - 1j])


@st.composite
def rationals(draw):
    poly = draw(st.lists(small, max_size=3))
    parts = {a: draw(st.lists(small, min_size=1, max_size=2)) for a in draw(st.sets(centers, max_size=2))}
    return Rational.make(poly, parts)


SAMPLE = np.array([0.3 + 1.1j, -0.7 - 0.4j, 1.6 + 0.2j])


def test_taylor_shift():
    # (x + 1)^2 = x^2 + 2x + 1, recentered at a = 1 gives (y + 2)^2
    assert np.allclose(taylor_shift([1, 2, 1], 1.0), [4, 4, 1])


def test_pole_and_reciprocal():
    r = Rational.pole(2.0, 3.0, order=2)
    assert abs(r(3.0) - 3.0) < 1e-15
    inv = r.reciprocal()
    assert np.allclose(inv(SAMPLE), 1 / r(SAMPLE))


def test_linear_reciprocal_is_simple_pole():
    inv = Rational.linear(1.5).reciprocal()
    assert inv.pole_locations == (1.5 + 0j,)
    assert np.allclose(inv(SAMPLE), 1 / (SAMPLE - 1.5))


def test_zero_normalizes():
    r = Rational.make([0, 0], {1.0: [0, 0]})
    assert r.is_zero


@given(rationals(), rationals())
def test_product_pointwise(a, b):
    assert np.allclose((a * b)(SAMPLE), a(SAMPLE) * b(SAMPLE), rtol=1e-10, atol=1e-10)


@given(rationals(), rationals())
def test_sum_pointwise(a, b):
    assert np.allclose((a + b)(SAMPLE), a(SAMPLE) + b(SAMPLE), rtol=1e-12, atol=1e-12)
    assert np.allclose(rational_sum([a, b, -a])(SAMPLE), b(SAMPLE), rtol=1e-12, atol=1e-12)


@given(rationals())
def test_derivative_matches_difference_quotient(a):
    h = 1e-6
    fd = (a(SAMPLE + h) - a(SAMPLE - h)) / (2 * h)
    assert np.allclose(a.derivative()(SAMPLE), fd, rtol=1e-6, atol=1e-6)


@given(rationals())
def test_series_composition_matches_evaluation(a):
    x0 = 0.1 + 0.9j
    s = a.at_series(LaurentSeries(0, [x0, 1.0] + [0.0] * 10))
    assert abs(s.coefficient(0) - a(x0)) < 1e-10 * max(1.0, abs(a(x0)))
