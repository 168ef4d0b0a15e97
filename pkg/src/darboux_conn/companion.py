"""Companion normal form on ``O + (Omega^1(D))^{-1}`` built from apparent-point data.

The connection matrix in the affine chart is ``[[0, w12], [w21, w22]]``. The
lower-left entry is fixed to ``dx / ((x - t) y)``; the other two entries have
simple poles at the three apparent points, prescribed polar parts over
``x = t`` and three free coefficients ``a3, a4, b3``. Those are determined by
requiring the connection to be apparent (holomorphically gaugeable) at each
of the three points, a 3x3 linear system solved by Cramer's rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .curve import (
    CurveForm,
    CurvePoint,
    LegendreCurve,
    infinity_point,
    lift_point,
    local_expansion,
)
from .errors import ConstructionError, InvalidConfig
from .numeric import DEFAULT_WINDOW, LinearSystem, SINGULARITY_THRESHOLD, determinant, residue, solve_linear
from .rational import Rational, rational_sum
from .spectral import ResidueParams, SpectralData, solve_residue_params
from .validation import as_complex

__all__ = [
    "GENUS",
    "N_APPARENT",
    "POLE_DEGREE",
    "ApparencyReport",
    "ApparentConfig",
    "ApparentPoint",
    "CompanionForm",
    "assemble_companion",
    "build_companion",
    "companion_residue_report",
    "compute_Cj",
    "make_config",
    "solve_accessory",
    "stability_det",
    "validate_config",
    "verify_apparency",
]

GENUS = 1
POLE_DEGREE = 2
N_APPARENT = 4 * GENUS - 3 + POLE_DEGREE
POINT_SEPARATION = 1e-10
APPARENCY_TOLERANCE = 1e-10
RESIDUE_TOLERANCE = 1e-10
RESUBSTITUTION_TOLERANCE = 1e-11


@dataclass(frozen=True)
class ApparentPoint:
    u: complex
    v: complex
    zeta: complex


@dataclass(frozen=True)
class ApparentConfig:
    points: tuple[ApparentPoint, ...]

    @property
    def u(self) -> np.ndarray:
        return np.array([p.u for p in self.points], dtype=complex)

    @property
    def v(self) -> np.ndarray:
        return np.array([p.v for p in self.points], dtype=complex)

    @property
    def zeta(self) -> np.ndarray:
        return np.array([p.zeta for p in self.points], dtype=complex)

    def curve_points(self) -> list[CurvePoint]:
        from .curve import Chart

        return [CurvePoint(Chart.U0, p.u, p.v) for p in self.points]


def make_config(curve: LegendreCurve, spectral: SpectralData,
                points: Iterable[tuple[complex, complex, complex]]) -> ApparentConfig:
    """Snap each ``(u, v_hint, zeta)`` onto the curve and validate the result."""
    pts = []
    for k, (u, v_hint, zeta) in enumerate(points):
        cp = lift_point(curve, u, v_hint)
        pts.append(ApparentPoint(cp.x, cp.y, as_complex(zeta, f"zeta[{k}]")))
    config = ApparentConfig(tuple(pts))
    validate_config(curve, spectral, config)
    return config


def validate_config(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig) -> None:
    if len(config.points) != N_APPARENT:
        raise InvalidConfig(f"expected {N_APPARENT} apparent points, got {len(config.points)}")
    t = spectral.t_value(curve)
    forbidden = list(curve.roots) + [t]
    for j, p in enumerate(config.points):
        for name in ("u", "v", "zeta"):
            as_complex(getattr(p, name), f"point {j} {name}")
        if any(abs(p.u - f) <= POINT_SEPARATION for f in forbidden):
            raise InvalidConfig(f"apparent point {j} collides with a branch point or with t")
        k = curve.K(p.u)
        if abs(p.v * p.v - k) > 1e-12 * max(1.0, abs(k)):
            raise InvalidConfig(f"apparent point {j} is not on the curve")
    u = config.u
    for i in range(N_APPARENT):
        for j in range(i + 1, N_APPARENT):
            if abs(u[i] - u[j]) <= POINT_SEPARATION:
                raise InvalidConfig(f"apparent points {i} and {j} share the same x")


def compute_Cj(config: ApparentConfig, params: ResidueParams, t: complex) -> np.ndarray:
    """Value at each apparent point of the part of the apparency condition
    that does not involve the free coefficients."""
    u, v, z = config.u, config.v, config.zeta
    out = np.zeros(N_APPARENT, dtype=complex)
    for j in range(N_APPARENT):
        acc = 0j
        for k in range(N_APPARENT):
            if k != j:
                acc += (z[k] - z[j]) / 2 * (v[j] + v[k]) / (u[j] - u[k])
        acc += (params.a1 + params.a2 * v[j] - z[j] * (params.b1 + params.b2 * v[j]) - z[j] ** 2) / (u[j] - t)
        out[j] = acc
    return out


def stability_det(config: ApparentConfig) -> complex:
    """Determinant of the rows ``(1, u_j, zeta_j)``; zero exactly on the unstable locus."""
    m = np.column_stack([np.ones(N_APPARENT, dtype=complex), config.u, config.zeta])
    return determinant(m)


def solve_accessory(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig,
                    params: ResidueParams | None = None, threshold: float = SINGULARITY_THRESHOLD
                    ) -> tuple[complex, complex, complex]:
    """Solve ``a3 + a4 u_j - zeta_j b3 = -C_j`` for ``(a3, a4, b3)``."""
    if params is None:
        params = solve_residue_params(curve, spectral)
    t = spectral.t_value(curve)
    c = compute_Cj(config, params, t)
    m = np.column_stack([np.ones(N_APPARENT, dtype=complex), config.u, -config.zeta])
    a3, a4, b3 = solve_linear(LinearSystem(m, -c), threshold=threshold, what="stability determinant")
    scale = max(1.0, abs(a3), abs(a4), abs(b3), float(np.max(np.abs(c))))
    resid = np.abs(c + a3 + a4 * config.u - config.zeta * b3)
    if float(resid.max()) > RESUBSTITUTION_TOLERANCE * scale:
        raise ConstructionError(f"apparency re-substitution residual {resid.max():.3e}")
    return complex(a3), complex(a4), complex(b3)


@dataclass(frozen=True, eq=False)
class CompanionForm:
    curve: LegendreCurve
    spectral: SpectralData
    config: ApparentConfig
    params: ResidueParams
    a3: complex
    a4: complex
    b3: complex
    omega12: CurveForm
    omega21: CurveForm
    omega22: CurveForm

    @property
    def t(self) -> complex:
        return self.spectral.t_value(self.curve)

    @property
    def c_values(self) -> np.ndarray:
        return compute_Cj(self.config, self.params, self.t)

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.a3), abs(self.a4), abs(self.b3), float(np.max(np.abs(self.c_values))))


def _sum_poles(centers: Sequence[complex], weights: Sequence[complex]) -> Rational:
    return rational_sum(Rational.pole(a, w) for a, w in zip(centers, weights))


def assemble_companion(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig,
                       params: ResidueParams, a3: complex, a4: complex, b3: complex) -> CompanionForm:
    """Assemble the three entries without any verification."""
    t = spectral.t_value(curve)
    u, v, z = config.u, config.v, config.zeta
    w12 = CurveForm(
        _sum_poles(u, z * v / 2) + Rational.pole(t, params.a1) + Rational.polynomial([a3, a4]),
        _sum_poles(u, z / 2) + Rational.pole(t, params.a2),
    )
    w21 = CurveForm.from_parts(Rational.pole(t, 1.0))
    w22 = CurveForm(
        _sum_poles(u, v / 2) + Rational.pole(t, params.b1) + Rational.constant(b3),
        _sum_poles(u, np.full(N_APPARENT, 0.5)) + Rational.pole(t, params.b2),
    )
    return CompanionForm(curve, spectral, config, params, complex(a3), complex(a4), complex(b3), w12, w21, w22)


@dataclass(frozen=True)
class ApparencyReport:
    residuals: tuple[float, ...]
    values: tuple[complex, ...]
    scale: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.residuals) < self.tolerance * self.scale

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def verify_apparency(form: CompanionForm, window: int = DEFAULT_WINDOW,
                     tolerance: float = APPARENCY_TOLERANCE) -> ApparencyReport:
    """Expand ``w12 - zeta w22 - zeta**2 w21`` at each apparent point.

    Apparency requires that this form be holomorphic there and vanish at the
    point. The residual is the largest of the polar and ``s**0``
    coefficients; it passes below ``tolerance`` times the coefficient scale.
    """
    residuals, values = [], []
    for p, cp in zip(form.config.points, form.config.curve_points()):
        expr = form.omega12 - form.omega22.scale(p.zeta) - form.omega21.scale(p.zeta ** 2)
        series = local_expansion(form.curve, cp, window).form(expr)
        low = min(series.lowest_order, -1)
        polar = max((abs(series.coefficient(k)) for k in range(low, 0)), default=0.0)
        value = series.coefficient(0)
        values.append(value)
        residuals.append(max(polar, abs(value)))
    return ApparencyReport(tuple(residuals), tuple(values), form.scale, tolerance)


def companion_residue_report(form: CompanionForm, window: int = DEFAULT_WINDOW) -> dict:
    """Residue matrices at the apparent points and the residue of ``w22`` at infinity."""
    mats = []
    for cp in form.config.curve_points():
        loc = local_expansion(form.curve, cp, window)
        mats.append(np.array([[0, residue(loc.form(form.omega12))],
                              [residue(loc.form(form.omega21)), residue(loc.form(form.omega22))]]))
    inf = local_expansion(form.curve, infinity_point(form.curve), window)
    return {"residue_matrices": mats, "res_infinity_omega22": residue(inf.form(form.omega22))}


def build_companion(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig,
                    window: int = DEFAULT_WINDOW) -> CompanionForm:
    """Solve for all coefficients, assemble, and check every residue condition."""
    validate_config(curve, spectral, config)
    params = solve_residue_params(curve, spectral)
    a3, a4, b3 = solve_accessory(curve, spectral, config, params)
    form = assemble_companion(curve, spectral, config, params, a3, a4, b3)
    rep = companion_residue_report(form, window)
    for j, (p, mat) in enumerate(zip(config.points, rep["residue_matrices"])):
        want = np.array([[0, p.zeta], [0, 1]])
        if np.max(np.abs(mat - want)) > RESIDUE_TOLERANCE * max(1.0, abs(p.zeta)):
            raise ConstructionError(f"residue matrix at apparent point {j} is {mat.tolist()}")
    if abs(rep["res_infinity_omega22"] + 2) > RESIDUE_TOLERANCE:
        raise ConstructionError(f"residue at infinity is {rep['res_infinity_omega22']}")
    app = verify_apparency(form, window)
    if not app.passed:
        raise ConstructionError(f"apparency residual {app.max_residual:.3e}")
    return form
