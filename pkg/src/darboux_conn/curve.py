"""The Legendre cubic ``y**2 = x (x - 1)(x - lam)``, its 1-forms and local expansions.

The curve is covered by the affine chart ``U0`` with coordinates ``(x, y)``
and the chart ``UInfty`` with ``(x2, y2) = (1/x, y/x**2)``, in which the point
at infinity is ``(0, 0)``. Every 1-form is stored in ``U0`` coordinates as
``(r1(x) + r2(x) y) dx / y`` and transported when expanded at infinity.
"""

from __future__ import annotations

import cmath
from functools import lru_cache
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from .errors import DegenerateCurve, OffCurve, SeriesError
from .numeric import (
    DEFAULT_WINDOW,
    LaurentSeries,
    residue,
    series_add,
    series_derivative,
    series_inverse,
    series_mul,
    series_sqrt,
)
from .rational import Rational, taylor_shift
from .validation import as_complex

__all__ = [
    "BRANCH_DISTANCE",
    "Chart",
    "CurveForm",
    "CurvePoint",
    "LegendreCurve",
    "LocalExpansion",
    "LocalParameter",
    "ParameterKind",
    "expand_form",
    "form_poles",
    "form_residue",
    "infinity_point",
    "lift_point",
    "local_expansion",
    "local_parameter",
    "make_curve",
]

BRANCH_DISTANCE = 1e-10
ON_CURVE_HINT_TOLERANCE = 1e-8
ON_CURVE_TOLERANCE = 1e-12
_GUARD = 8


class Chart(str, Enum):
    U0 = "U0"
    UINF = "UInfty"


class ParameterKind(str, Enum):
    GENERIC = "generic"
    BRANCH = "branch"
    INFINITY = "infinity"


@dataclass(frozen=True)
class LegendreCurve:
    """Elliptic curve in Legendre form; ``lam`` avoids 0 and 1."""

    lam: complex

    @property
    def poly(self) -> tuple[complex, ...]:
        """Ascending coefficients of ``K(x) = x (x - 1)(x - lam)``."""
        lam = self.lam
        return (0j, lam, -(1 + lam), 1 + 0j)

    @property
    def poly_infinity(self) -> tuple[complex, ...]:
        """Ascending coefficients of ``x2 (1 - x2)(1 - lam x2)``."""
        lam = self.lam
        return (0j, 1 + 0j, -(1 + lam), lam)

    @property
    def roots(self) -> tuple[complex, complex, complex]:
        return (0j, 1 + 0j, self.lam)

    @property
    def roots_infinity(self) -> tuple[complex, complex, complex]:
        return (0j, 1 + 0j, 1.0 / self.lam)

    def K(self, x):
        x = np.asarray(x, dtype=complex)
        out = x * (x - 1) * (x - self.lam)
        return out if out.ndim else complex(out)

    def dK(self, x):
        x = np.asarray(x, dtype=complex)
        out = 3 * x * x - 2 * (1 + self.lam) * x + self.lam
        return out if out.ndim else complex(out)

    def K_rational(self) -> Rational:
        return Rational.polynomial(self.poly)


def make_curve(lam: complex) -> LegendreCurve:
    lam = as_complex(lam, "lambda")
    if abs(lam) <= 1e-12 or abs(lam - 1) <= 1e-12:
        raise DegenerateCurve(f"lambda = {lam!r} makes the cubic singular")
    return LegendreCurve(lam)


@dataclass(frozen=True)
class CurvePoint:
    chart: Chart
    x: complex
    y: complex

    @property
    def is_infinity(self) -> bool:
        return self.chart is Chart.UINF and self.x == 0


def _check_on_curve(curve: LegendreCurve, chart: Chart, x: complex, y: complex, tol: float) -> None:
    poly = curve.poly if chart is Chart.U0 else curve.poly_infinity
    k = complex(np.polynomial.polynomial.polyval(x, poly))
    scale = max(1.0, abs(k), abs(y) ** 2)
    if abs(y * y - k) > tol * scale:
        raise OffCurve(f"({x!r}, {y!r}) is not on the curve in chart {chart.value}")


def lift_point(curve: LegendreCurve, u: complex, v_hint: complex, chart: Chart = Chart.U0
               ) -> CurvePoint:
    """Snap ``(u, v_hint)`` to the curve, keeping the branch nearest ``v_hint``."""
    u = as_complex(u, "u")
    v_hint = as_complex(v_hint, "v_hint")
    chart = Chart(chart)
    roots = curve.roots if chart is Chart.U0 else curve.roots_infinity
    for e in roots:
        if abs(u - e) <= BRANCH_DISTANCE:
            _check_on_curve(curve, chart, e, v_hint, ON_CURVE_HINT_TOLERANCE)
            return CurvePoint(chart, e, 0j)
    _check_on_curve(curve, chart, u, v_hint, ON_CURVE_HINT_TOLERANCE)
    poly = curve.poly if chart is Chart.U0 else curve.poly_infinity
    root = cmath.sqrt(complex(np.polynomial.polynomial.polyval(u, poly)))
    y = root if abs(root - v_hint) <= abs(root + v_hint) else -root
    return CurvePoint(chart, u, y)


def infinity_point(curve: LegendreCurve) -> CurvePoint:
    return CurvePoint(Chart.UINF, 0j, 0j)


@dataclass(frozen=True)
class LocalParameter:
    point: CurvePoint
    kind: ParameterKind


def local_parameter(curve: LegendreCurve, point: CurvePoint) -> LocalParameter:
    """``x - u`` at ordinary points, ``y`` at branch points, ``y2`` at infinity."""
    if point.is_infinity:
        return LocalParameter(point, ParameterKind.INFINITY)
    roots = curve.roots if point.chart is Chart.U0 else curve.roots_infinity
    if any(abs(point.x - e) <= BRANCH_DISTANCE for e in roots):
        return LocalParameter(point, ParameterKind.BRANCH)
    _check_on_curve(curve, point.chart, point.x, point.y, ON_CURVE_TOLERANCE)
    return LocalParameter(point, ParameterKind.GENERIC)


@dataclass(frozen=True, eq=False)
class CurveForm:
    """The meromorphic 1-form ``(r1(x) + r2(x) y) dx / y`` in chart ``U0``."""

    r1: Rational
    r2: Rational

    @classmethod
    def zero(cls) -> "CurveForm":
        return cls(Rational.make(), Rational.make())

    @classmethod
    def dx_over_y(cls, c: complex = 1.0) -> "CurveForm":
        return cls(Rational.constant(c), Rational.make())

    @classmethod
    def exact(cls, f: Rational) -> "CurveForm":
        """The differential ``d f`` of a function of ``x``."""
        return cls(Rational.make(), f.derivative())

    @classmethod
    def from_parts(cls, r1: Rational | None = None, r2: Rational | None = None) -> "CurveForm":
        return cls(r1 if r1 is not None else Rational.make(), r2 if r2 is not None else Rational.make())

    def __add__(self, other: "CurveForm") -> "CurveForm":
        return CurveForm(self.r1 + other.r1, self.r2 + other.r2)

    def __sub__(self, other: "CurveForm") -> "CurveForm":
        return CurveForm(self.r1 - other.r1, self.r2 - other.r2)

    def __neg__(self) -> "CurveForm":
        return self.scale(-1.0)

    def scale(self, c: complex) -> "CurveForm":
        return CurveForm(self.r1.scale(c), self.r2.scale(c))

    def __mul__(self, c: complex) -> "CurveForm":
        if isinstance(c, (CurveForm, Rational)):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def times(self, f: Rational) -> "CurveForm":
        """Multiply by a function of ``x`` alone."""
        return CurveForm(self.r1 * f, self.r2 * f)

    def times_curve_function(self, curve: LegendreCurve, f1: Rational, f2: Rational) -> "CurveForm":
        """Multiply by ``f1(x) + f2(x) y``, reducing ``y**2`` to ``K(x)``."""
        k = curve.K_rational()
        return CurveForm(f1 * self.r1 + f2 * self.r2 * k, f1 * self.r2 + f2 * self.r1)

    @property
    def is_zero(self) -> bool:
        return self.r1.is_zero and self.r2.is_zero

    def coefficient_norm(self) -> float:
        return max(self.r1.coefficient_norm(), self.r2.coefficient_norm())

    @property
    def pole_locations(self) -> tuple[complex, ...]:
        seen: dict[complex, None] = {}
        for a in self.r1.pole_locations + self.r2.pole_locations:
            seen.setdefault(a, None)
        return tuple(seen)

    def evaluate(self, x, y):
        """Coefficient of ``dx`` at points ``(x, y)`` of the affine chart."""
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        out = self.r1(x) / y + self.r2(x)
        return out if np.ndim(out) else complex(out)

    def __repr__(self) -> str:
        return f"CurveForm(r1={self.r1!r}, r2={self.r2!r})"


def _reversion_at_branch(poly: tuple[complex, ...], e: complex, terms: int) -> LaurentSeries:
    """Series ``w(S)`` with ``poly(e + w) = S`` near a simple root ``e``."""
    f = taylor_shift(poly, e)
    s_series = LaurentSeries(1, np.concatenate([[1.0], np.zeros(terms, dtype=complex)]))
    w = LaurentSeries(1, np.concatenate([[1.0 / f[1]], np.zeros(terms, dtype=complex)]))
    for _ in range(terms + 1):
        # phi(w) by Horner on its three coefficients
        pw = series_add(series_mul(series_add(series_mul(_const(f[3], w), w), _const(f[2], w)), w),
                        _const(f[1], w))
        w = series_mul(s_series, series_inverse(pw))
    return w


def _const(c: complex, like: LaurentSeries) -> LaurentSeries:
    coeffs = np.zeros(max(like.truncation_order, 0) + 1, dtype=complex)
    coeffs[0] = c
    return LaurentSeries(0, coeffs)


def _spread_even(w: LaurentSeries, top: int) -> LaurentSeries:
    coeffs = np.zeros(top + 1, dtype=complex)
    for k in range(w.lowest_order, w.truncation_order + 1):
        if 2 * k <= top:
            coeffs[2 * k] = w.coefficient(k)
    return LaurentSeries(0, coeffs, trim=False)


def _poly_series(coeffs: Iterable[complex], top: int) -> LaurentSeries:
    c = np.zeros(top + 1, dtype=complex)
    vals = list(coeffs)
    c[:min(len(vals), top + 1)] = vals[:top + 1]
    return LaurentSeries(0, c, trim=False)


@dataclass(frozen=True)
class LocalExpansion:
    """Series for ``x``, ``y`` and ``dx/ds`` in a local parameter ``s`` at a point.

    ``x_series`` and ``y_series`` are always chart-``U0`` coordinates, so any
    :class:`CurveForm` can be pulled back directly.
    """

    parameter: LocalParameter
    window: int
    x_series: LaurentSeries
    y_series: LaurentSeries
    dx_series: LaurentSeries
    y_inverse: LaurentSeries
    _cache: dict = field(default_factory=dict, repr=False)

    def function(self, f1: Rational, f2: Rational | None = None) -> LaurentSeries:
        """Expansion of the function ``f1(x) + f2(x) y``."""
        out = f1.at_series(self.x_series, self._cache)
        if f2 is not None and not f2.is_zero:
            out = series_add(out, series_mul(f2.at_series(self.x_series, self._cache), self.y_series))
        return out

    def form(self, form: CurveForm) -> LaurentSeries:
        """Coefficient series ``f(s)`` with ``form = f(s) ds``."""
        r1 = form.r1.at_series(self.x_series, self._cache)
        r2 = form.r2.at_series(self.x_series, self._cache)
        coeff = series_add(series_mul(r1, self.y_inverse), r2)
        out = series_mul(coeff, self.dx_series)
        out = out.truncate(out.lowest_order + self.window - 1)
        if out.truncation_order < -1:
            raise SeriesError("expansion window exhausted before reaching order -1")
        return out


def local_expansion(curve: LegendreCurve, point: CurvePoint, window: int = DEFAULT_WINDOW
                    ) -> LocalExpansion:
    # expansions are immutable and the same points recur across one verification
    return _local_expansion(curve, point, int(window))


@lru_cache(maxsize=256)
def _local_expansion(curve: LegendreCurve, point: CurvePoint, window: int) -> LocalExpansion:
    if window < 4:
        raise ValueError("window must be at least 4")
    param = local_parameter(curve, point)
    top = window + _GUARD
    if param.kind is ParameterKind.GENERIC:
        poly = curve.poly if point.chart is Chart.U0 else curve.poly_infinity
        xs = _poly_series([point.x, 1.0], top)
        ks = _poly_series(taylor_shift(poly, point.x), top)
        ys = series_sqrt(ks, point.y)
        dxs = _poly_series([1.0], top)
    else:
        roots = curve.roots if point.chart is Chart.U0 else curve.roots_infinity
        poly = curve.poly if point.chart is Chart.U0 else curve.poly_infinity
        e = min(roots, key=lambda r: abs(r - point.x))
        w = _reversion_at_branch(poly, e, top // 2 + 1)
        xs = series_add(_spread_even(w, top), _poly_series([e], top))
        ys = LaurentSeries(1, np.concatenate([[1.0], np.zeros(top, dtype=complex)]), trim=False)
        dxs = series_derivative(xs)
    if point.chart is Chart.UINF:
        x1 = series_inverse(xs)
        ys = series_mul(ys, series_mul(x1, x1))
        dxs = series_mul(series_mul(dxs, series_mul(x1, x1)), _const(-1.0, x1))
        xs = x1
    return LocalExpansion(param, window, xs, ys, dxs, series_inverse(ys))


def expand_form(curve: LegendreCurve, form: CurveForm, at: CurvePoint, window: int = DEFAULT_WINDOW
                ) -> LaurentSeries:
    """Laurent series of ``form`` in the local parameter at ``at``."""
    return local_expansion(curve, at, window).form(form)


def form_residue(curve: LegendreCurve, form: CurveForm, at: CurvePoint, window: int = DEFAULT_WINDOW
                 ) -> complex:
    return residue(expand_form(curve, form, at, window))


def form_poles(curve: LegendreCurve, form: CurveForm) -> list[CurvePoint]:
    """Every point where ``form`` may have a pole, always including infinity."""
    pts: list[CurvePoint] = []
    for a in form.pole_locations:
        if any(abs(a - e) <= BRANCH_DISTANCE for e in curve.roots):
            pts.append(lift_point(curve, a, 0j))
        else:
            root = cmath.sqrt(curve.K(a))
            pts.append(CurvePoint(Chart.U0, a, root))
            pts.append(CurvePoint(Chart.U0, a, -root))
    pts.append(infinity_point(curve))
    return pts
