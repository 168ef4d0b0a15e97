"""Pole exponents at the divisor over ``x = t`` and the polar coefficients they fix.

Two variants are supported:

* logarithmic: ``t`` is not a root of the cubic, the divisor is the pair
  ``(t, s) + (t, -s)`` and each point carries two residue exponents;
* irregular: ``t`` is a root of the cubic, the divisor is twice the branch
  point, and the local exponents are given in the parameter ``y``.

The polar coefficients are named after their role in the companion form:
``a1 + a2*y`` and ``b1 + b2*y`` are the numerators of the ``1/(x - t)`` terms
of the upper-right and lower-right entries.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

from .curve import CurveForm, LegendreCurve, expand_form, form_residue, lift_point
from .errors import InvalidSpectralData
from .numeric import LinearSystem, series_add, series_mul, series_scale, series_sqrt, series_sub, solve_linear
from .rational import Rational
from .validation import as_complex

__all__ = [
    "GenericityReport",
    "IrregularSpectrum",
    "LogarithmicSpectrum",
    "PolarCheck",
    "ResidueParams",
    "SpectralData",
    "check_genericity",
    "check_polar_spectrum",
    "irregular_spectrum",
    "logarithmic_spectrum",
    "polar_forms",
    "solve_residue_params",
    "validate_spectral",
]

INTEGER_DISTANCE = 1e-8
FUCHS_TOLERANCE = 1e-12
RESUBSTITUTION_TOLERANCE = 1e-12

TRoot = Literal["0", "1", "lambda", "infty"]


@dataclass(frozen=True)
class LogarithmicSpectrum:
    t: complex
    s: complex
    theta1_plus: complex
    theta1_minus: complex
    theta2_plus: complex
    theta2_minus: complex

    kind = "logarithmic"

    def t_value(self, curve: LegendreCurve) -> complex:
        return self.t


@dataclass(frozen=True)
class IrregularSpectrum:
    t_root: TRoot
    theta_m2_plus: complex
    theta_m2_minus: complex
    theta_m1_plus: complex
    theta_m1_minus: complex = field(init=False)

    kind = "irregular"

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta_m1_minus", -1.0 - complex(self.theta_m1_plus))

    def t_value(self, curve: LegendreCurve) -> complex:
        if self.t_root == "0":
            return 0j
        if self.t_root == "1":
            return 1 + 0j
        if self.t_root == "lambda":
            return curve.lam
        raise InvalidSpectralData(
            "an irregular pole at infinity is not supported; substitute x -> 1/x and "
            "lambda -> 1/lambda to move it to the branch point over 0")


SpectralData = Union[LogarithmicSpectrum, IrregularSpectrum]


@dataclass(frozen=True)
class ResidueParams:
    a1: complex
    a2: complex
    b1: complex
    b2: complex


def logarithmic_spectrum(curve: LegendreCurve, t: complex, s_branch: complex,
                         theta1: tuple[complex, complex], theta2: tuple[complex, complex]
                         ) -> LogarithmicSpectrum:
    """Build logarithmic data with ``s`` snapped onto the curve over ``t``."""
    t = as_complex(t, "t")
    pt = lift_point(curve, t, as_complex(s_branch, "s_branch"))
    data = LogarithmicSpectrum(t, pt.y, as_complex(theta1[0], "theta1+"), as_complex(theta1[1], "theta1-"),
                               as_complex(theta2[0], "theta2+"), as_complex(theta2[1], "theta2-"))
    validate_spectral(curve, data)
    return data


def irregular_spectrum(curve: LegendreCurve, t_root: TRoot, theta_m2: tuple[complex, complex],
                       theta_m1_plus: complex) -> IrregularSpectrum:
    if t_root not in ("0", "1", "lambda", "infty"):
        raise InvalidSpectralData(f"unknown t_root {t_root!r}")
    data = IrregularSpectrum(t_root, as_complex(theta_m2[0], "theta_m2+"),
                             as_complex(theta_m2[1], "theta_m2-"), as_complex(theta_m1_plus, "theta_m1+"))
    validate_spectral(curve, data)
    return data


def _integer_distance(z: complex) -> float:
    return abs(z - round(z.real))


@dataclass(frozen=True)
class GenericityReport:
    passed: bool
    checks: dict[str, dict]


def check_genericity(data: SpectralData) -> GenericityReport:
    """Per-condition pass/fail with the measured distances; never raises."""
    checks: dict[str, dict] = {}
    if isinstance(data, LogarithmicSpectrum):
        total = data.theta1_plus + data.theta1_minus + data.theta2_plus + data.theta2_minus
        checks["fuchs"] = {"value": total, "distance": abs(total + 1),
                           "passed": abs(total + 1) <= FUCHS_TOLERANCE}
        for name, (p, m) in {"theta1": (data.theta1_plus, data.theta1_minus),
                             "theta2": (data.theta2_plus, data.theta2_minus)}.items():
            d = _integer_distance(p - m)
            checks[f"{name}_difference"] = {"distance": d, "passed": d > INTEGER_DISTANCE}
        for sa, a in (("+", data.theta1_plus), ("-", data.theta1_minus)):
            for sb, b in (("+", data.theta2_plus), ("-", data.theta2_minus)):
                d = _integer_distance(a + b)
                checks[f"sum_1{sa}_2{sb}"] = {"distance": d, "passed": d > INTEGER_DISTANCE}
    else:
        gap = abs(data.theta_m2_plus - data.theta_m2_minus)
        checks["distinct_leading"] = {"distance": gap, "passed": gap > INTEGER_DISTANCE}
        checks["supported_root"] = {"passed": data.t_root != "infty"}
    return GenericityReport(all(c["passed"] for c in checks.values()), checks)


def validate_spectral(curve: LegendreCurve, data: SpectralData) -> None:
    if isinstance(data, LogarithmicSpectrum):
        if any(abs(data.t - e) <= 1e-10 for e in curve.roots):
            raise InvalidSpectralData("logarithmic data needs t away from the branch points")
        if abs(data.s * data.s - curve.K(data.t)) > 1e-12 * max(1.0, abs(curve.K(data.t))):
            raise InvalidSpectralData("s**2 != K(t)")
    else:
        data.t_value(curve)
    report = check_genericity(data)
    if not report.passed:
        failed = sorted(k for k, v in report.checks.items() if not v["passed"])
        raise InvalidSpectralData(f"spectral data fails: {', '.join(failed)}")


def solve_residue_params(curve: LegendreCurve, data: SpectralData) -> ResidueParams:
    """Polar coefficients reproducing the prescribed local exponents.

    Logarithmic case: at ``(t, +-s)`` the residue matrix of the companion form
    is ``[[0, r12], [r21, r22]]`` with ``r21 = 1/(+-s)``. Its eigenvalue sum
    is ``r22`` and its eigenvalue product is ``-r12 * r21``; matching those to
    the exponents gives two 2x2 systems, solved here.
    """
    validate_spectral(curve, data)
    if isinstance(data, LogarithmicSpectrum):
        s = data.s
        p1 = data.theta1_plus * data.theta1_minus
        p2 = data.theta2_plus * data.theta2_minus
        q1 = data.theta1_plus + data.theta1_minus
        q2 = data.theta2_plus + data.theta2_minus
        m = np.array([[1.0, s], [1.0, -s]], dtype=complex)
        a1, a2 = solve_linear(LinearSystem(m, [-s * s * p1, -s * s * p2]), what="polar product system")
        b1, b2 = solve_linear(LinearSystem(m, [s * q1, -s * q2]), what="polar trace system")
        params = ResidueParams(complex(a1), complex(a2), complex(b1), complex(b2))
        _check_log_resubstitution(data, params)
        return params
    tp, tm = data.theta_m2_plus, data.theta_m2_minus
    up, um = data.theta_m1_plus, data.theta_m1_minus
    return ResidueParams(a1=-0.25 * tp * tm, a2=-0.25 * (tp * um + tm * up),
                         b1=0.5 * (tp + tm), b2=-0.5 + 0j)


def _check_log_resubstitution(data: LogarithmicSpectrum, p: ResidueParams) -> None:
    s = data.s
    got = [
        -(p.a1 + p.a2 * s) / s * (1 / s),
        -(p.a1 - p.a2 * s) / (-s) * (1 / (-s)),
        (p.b1 + p.b2 * s) / s,
        (p.b1 - p.b2 * s) / (-s),
    ]
    want = [data.theta1_plus * data.theta1_minus, data.theta2_plus * data.theta2_minus,
            data.theta1_plus + data.theta1_minus, data.theta2_plus + data.theta2_minus]
    for g, w in zip(got, want):
        if abs(g - w) > RESUBSTITUTION_TOLERANCE * max(1.0, abs(w)):
            raise InvalidSpectralData("polar coefficients fail re-substitution")


def polar_forms(curve: LegendreCurve, data: SpectralData, params: ResidueParams
                ) -> tuple[CurveForm, CurveForm, CurveForm]:
    """Polar parts at ``x = t`` of the three companion entries."""
    t = data.t_value(curve)
    w12 = CurveForm.from_parts(Rational.pole(t, params.a1), Rational.pole(t, params.a2))
    w21 = CurveForm.from_parts(Rational.pole(t, 1.0))
    w22 = CurveForm.from_parts(Rational.pole(t, params.b1), Rational.pole(t, params.b2))
    return w12, w21, w22


@dataclass(frozen=True)
class PolarCheck:
    """Measured versus prescribed local exponents at the pole divisor."""

    passed: bool
    max_error: float
    measured: dict[str, list[complex]]
    expected: dict[str, list[complex]]


def _match_pair(got: tuple[complex, complex], want: tuple[complex, complex]) -> tuple[list[complex], float]:
    straight = max(abs(got[0] - want[0]), abs(got[1] - want[1]))
    swapped = max(abs(got[1] - want[0]), abs(got[0] - want[1]))
    if straight <= swapped:
        return [got[0], got[1]], straight
    return [got[1], got[0]], swapped


def check_polar_spectrum(curve: LegendreCurve, data: SpectralData,
                         forms: tuple[CurveForm, CurveForm, CurveForm], tol: float | None = None,
                         window: int = 12) -> PolarCheck:
    """Recover the exponents from ``(w12, w21, w22)`` through series expansion.

    Logarithmic: eigenvalues of the residue matrix at ``(t, s)`` and
    ``(t, -s)``. Irregular: the ``y**-2`` and ``y**-1`` coefficients of the
    eigenvalue expansions at the branch point, from the quadratic formula
    applied to the trace and determinant series.
    """
    w12, w21, w22 = forms
    measured: dict[str, list[complex]] = {}
    expected: dict[str, list[complex]] = {}
    worst = 0.0
    if isinstance(data, LogarithmicSpectrum):
        tol = 1e-9 if tol is None else tol
        for label, sign, want in (("t1", 1, (data.theta1_plus, data.theta1_minus)),
                                  ("t2", -1, (data.theta2_plus, data.theta2_minus))):
            pt = lift_point(curve, data.t, sign * data.s)
            r12 = form_residue(curve, w12, pt, window)
            r21 = form_residue(curve, w21, pt, window)
            r22 = form_residue(curve, w22, pt, window)
            disc = cmath.sqrt(r22 * r22 + 4 * r12 * r21)
            got, err = _match_pair(((r22 + disc) / 2, (r22 - disc) / 2), want)
            measured[label] = got
            expected[label] = list(want)
            worst = max(worst, err)
    else:
        tol = 1e-8 if tol is None else tol
        pt = lift_point(curve, data.t_value(curve), 0j)
        e12 = expand_form(curve, w12, pt, window)
        e21 = expand_form(curve, w21, pt, window)
        e22 = expand_form(curve, w22, pt, window)
        det = series_scale(series_mul(e12, e21), -1.0)
        disc = series_sub(series_mul(e22, e22), series_scale(det, 4.0))
        target = data.theta_m2_plus - data.theta_m2_minus
        lead = cmath.sqrt(disc.leading_coefficient)
        root = series_sqrt(disc, lead if abs(lead - target) <= abs(lead + target) else -lead)
        plus = series_scale(series_add(e22, root), 0.5)
        minus = series_scale(series_sub(e22, root), 0.5)
        got = [plus.coefficient(-2), minus.coefficient(-2), plus.coefficient(-1), minus.coefficient(-1)]
        want = [data.theta_m2_plus, data.theta_m2_minus, data.theta_m1_plus, data.theta_m1_minus]
        measured["branch"] = got
        expected["branch"] = want
        worst = max(abs(g - w) for g, w in zip(got, want))
    return PolarCheck(worst <= tol, worst, measured, expected)

