"""Five-chart atlas gluing the rank-2 bundle and its connection.

Charts are ``U0`` (affine part minus the apparent points), ``Uq1..Uq3`` (small
discs around the apparent points) and ``UInfty``. Every connection matrix is
stored as a grid of :class:`CurveForm` written in the affine coordinates
``(x, y)``, so the gauge identity ``B^-1 A B + B^-1 dB = A'`` is an identity
in the function field and can be evaluated anywhere on the overlap.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .companion import CompanionForm
from .curve import CurveForm, CurvePoint, form_residue, infinity_point, local_expansion
from .errors import GluingFailure
from .numeric import DEFAULT_WINDOW
from .rational import Rational
from .spectral import PolarCheck, check_polar_spectrum

__all__ = [
    "AtlasChecks",
    "ConnectionAtlas",
    "DegreeReport",
    "FormMatrix",
    "FunctionMatrix",
    "GluingReport",
    "HolomorphyReport",
    "TraceReport",
    "assemble_atlas",
    "build_atlas",
    "check_gluing",
    "check_holomorphy",
    "check_trace_cocycle",
    "chart_names",
    "extract_trace_section",
    "gauge",
    "line_bundle_degree",
    "verify_atlas",
]

GLUING_TOLERANCE = 1e-9
HOLOMORPHY_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-10
POLE_CLEARANCE = 0.05
DEGREE_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class FunctionMatrix:
    """A 2x2 matrix of rational functions of ``x``."""

    entries: tuple[tuple[Rational, Rational], tuple[Rational, Rational]]

    @classmethod
    def of(cls, a, b, c, d) -> "FunctionMatrix":
        conv = [e if isinstance(e, Rational) else Rational.constant(e) for e in (a, b, c, d)]
        return cls(((conv[0], conv[1]), (conv[2], conv[3])))

    def det(self) -> Rational:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    def inverse(self) -> "FunctionMatrix":
        """Inverse when the determinant is a monomial unit ``c (x - a)**k``."""
        (a, b), (c, d) = self.entries
        r = self.det().reciprocal()
        return FunctionMatrix.of(d * r, -(b * r), -(c * r), a * r)

    def differential(self) -> "FormMatrix":
        return FormMatrix(tuple(tuple(CurveForm.exact(e) for e in row) for row in self.entries))

    def __call__(self, x) -> np.ndarray:
        return np.array([[e(x) for e in row] for row in self.entries])

    def __matmul__(self, other: "FormMatrix") -> "FormMatrix":
        return FormMatrix(tuple(
            tuple(_dot(self.entries[i], [other.entries[0][j], other.entries[1][j]])
                  for j in range(2))
            for i in range(2)))


@dataclass(frozen=True, eq=False)
class FormMatrix:
    """A 2x2 matrix of meromorphic 1-forms."""

    entries: tuple[tuple[CurveForm, CurveForm], tuple[CurveForm, CurveForm]]

    @classmethod
    def of(cls, a, b, c, d) -> "FormMatrix":
        return cls(((a, b), (c, d)))

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        return FormMatrix(tuple(tuple(self.entries[i][j] + other.entries[i][j] for j in range(2))
                                for i in range(2)))

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "FormMatrix":
        return FormMatrix(tuple(tuple(e.scale(c) for e in row) for row in self.entries))

    def trace(self) -> CurveForm:
        return self.entries[0][0] + self.entries[1][1]

    def __matmul__(self, other: FunctionMatrix) -> "FormMatrix":
        return FormMatrix(tuple(
            tuple(_dot([other.entries[0][j], other.entries[1][j]], self.entries[i])
                  for j in range(2))
            for i in range(2)))

    def evaluate(self, x, y) -> np.ndarray:
        """``dx`` coefficients, shaped ``(2, 2) + shape(x)``."""
        return np.array([[np.asarray(e.evaluate(x, y)) for e in row] for row in self.entries])

    def coefficient_norm(self) -> float:
        return max(e.coefficient_norm() for row in self.entries for e in row)


def _dot(funcs, forms) -> CurveForm:
    acc = CurveForm.zero()
    for f, w in zip(funcs, forms):
        if not f.is_zero and not w.is_zero:
            acc = acc + w.times(f)
    return acc


def gauge(transition: FunctionMatrix, conn: FormMatrix, flip_differential: bool = False) -> FormMatrix:
    """``B^-1 A B + B^-1 dB``; ``flip_differential`` negates the last term."""
    inv = transition.inverse()
    d_term = inv @ transition.differential()
    out = inv @ (conn @ transition)
    return out - d_term if flip_differential else out + d_term


def chart_names() -> tuple[str, ...]:
    return ("U0", "Uq1", "Uq2", "Uq3", "UInfty")


@dataclass(frozen=True, eq=False)
class ConnectionAtlas:
    companion: CompanionForm
    transitions: dict[str, FunctionMatrix]
    connection_matrices: dict[str, FormMatrix]
    centers: dict[str, CurvePoint]

    @property
    def curve(self):
        return self.companion.curve

    def singular_x(self) -> list[complex]:
        return list(self.curve.roots) + [self.companion.t] + list(self.companion.config.u)


def _local_forms(form: CompanionForm, j: int) -> tuple[CurveForm, CurveForm, CurveForm]:
    p = form.config.points[j]
    log_term = CurveForm.exact(Rational.linear(p.u)).times(Rational.pole(p.u, 1.0))
    w11 = form.omega21.scale(-p.zeta)
    w12 = form.omega12 - form.omega22.scale(p.zeta) - form.omega21.scale(p.zeta ** 2)
    w22 = form.omega22 + form.omega21.scale(p.zeta) - log_term
    return w11, w12, w22


def assemble_atlas(form: CompanionForm) -> ConnectionAtlas:
    zero = CurveForm.zero()
    a0 = FormMatrix.of(zero, form.omega12, form.omega21, form.omega22)
    transitions: dict[str, FunctionMatrix] = {}
    matrices = {"U0": a0}
    centers: dict[str, CurvePoint] = {}
    for j, (p, cp) in enumerate(zip(form.config.points, form.config.curve_points()), start=1):
        name = f"Uq{j}"
        transitions[name] = FunctionMatrix.of(1.0, Rational.pole(p.u, p.zeta), 0.0, Rational.pole(p.u, 1.0))
        w11, w12, w22 = _local_forms(form, j - 1)
        matrices[name] = FormMatrix.of(w11, w12.times(Rational.pole(p.u, 1.0)),
                                       form.omega21.times(Rational.linear(p.u)), w22)
        centers[name] = cp
    x = Rational.polynomial([0.0, 1.0])
    transitions["UInfty"] = FunctionMatrix.of(1.0, 0.0, 0.0, Rational.pole(0j, -1.0))
    matrices["UInfty"] = FormMatrix.of(zero, form.omega12.times(Rational.pole(0j, -1.0)),
                                       form.omega21.times(x.scale(-1.0)),
                                       form.omega22 - CurveForm.exact(x).times(Rational.pole(0j, 1.0)))
    centers["UInfty"] = infinity_point(form.curve)
    return ConnectionAtlas(form, transitions, matrices, centers)


@dataclass(frozen=True)
class GluingReport:
    residuals: dict[str, float]
    locations: dict[str, complex]
    n_samples: int
    seed: int
    tolerance: float
    warnings: tuple[str, ...] = ()

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance


def _overlap_samples(atlas: ConnectionAtlas, chart: str, n: int, seed: int) -> np.ndarray:
    """Quasi-random ``x`` values on the overlap of ``U0`` with ``chart``."""
    bad = np.array(atlas.singular_x())
    if chart == "UInfty":
        big = 2.0 * (1.0 + float(np.max(np.abs(bad))))
        r_lo, r_hi, center = big, 2.0 * big, 0j
    else:
        center = atlas.centers[chart].x
        others = [b for b in bad if abs(b - center) > 0]
        r_hi = max(2 * POLE_CLEARANCE, 0.5 * min(abs(b - center) for b in others))
        r_lo = POLE_CLEARANCE
    index = chart_names().index(chart)
    engine = qmc.Halton(d=2, scramble=True, seed=np.random.default_rng([seed, index]))
    out: list[complex] = []
    while len(out) < n:
        for a, b in engine.random(max(2 * n, 8)):
            x = center + (r_lo + (r_hi - r_lo) * a) * cmath.exp(2j * math.pi * b)
            if np.min(np.abs(bad - x)) > POLE_CLEARANCE:
                out.append(x)
                if len(out) == n:
                    break
    return np.array(out, dtype=complex)


def _both_sheets(atlas: ConnectionAtlas, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ys = np.sqrt(atlas.curve.K(xs))
    return np.concatenate([xs, xs]), np.concatenate([ys, -ys])


def check_gluing(atlas: ConnectionAtlas, n_samples: int = 20, seed: int = 0,
                 flip_differential: bool = False, tolerance: float = GLUING_TOLERANCE) -> GluingReport:
    """Compare ``B^-1 A0 B + B^-1 dB`` with each chart's matrix on both sheets."""
    if n_samples <= 0:
        msg = "no overlap samples requested; gluing passes vacuously"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        return GluingReport({}, {}, 0, seed, tolerance, (msg,))
    residuals: dict[str, float] = {}
    locations: dict[str, complex] = {}
    a0 = atlas.connection_matrices["U0"]
    for name, b in atlas.transitions.items():
        moved = gauge(b, a0, flip_differential)
        xs, ys = _both_sheets(atlas, _overlap_samples(atlas, name, n_samples, seed))
        got = moved.evaluate(xs, ys)
        want = atlas.connection_matrices[name].evaluate(xs, ys)
        err = np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want)), axis=(0, 1))
        k = int(np.argmax(err))
        residuals[name] = float(err[k])
        locations[name] = complex(xs[k])
    return GluingReport(residuals, locations, n_samples, seed, tolerance)


@dataclass(frozen=True)
class HolomorphyReport:
    residuals: dict[str, float]
    scale: float
    tolerance: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance * self.scale


def check_holomorphy(atlas: ConnectionAtlas, window: int = DEFAULT_WINDOW,
                     tolerance: float = HOLOMORPHY_TOLERANCE) -> HolomorphyReport:
    """Largest polar coefficient of each local matrix at its chart center.

    A chart passes when its residual is below ``tolerance`` times the
    companion coefficient scale.
    """
    scale = atlas.companion.scale
    residuals = {}
    for name in chart_names()[1:]:
        loc = local_expansion(atlas.curve, atlas.centers[name], window)
        worst = 0.0
        for row in atlas.connection_matrices[name].entries:
            for entry in row:
                if entry.is_zero:
                    continue
                s = loc.form(entry)
                for k in range(s.lowest_order, 0):
                    worst = max(worst, abs(s.coefficient(k)))
        residuals[name] = worst
    return HolomorphyReport(residuals, scale, tolerance)


def extract_trace_section(atlas: ConnectionAtlas) -> dict[str, CurveForm]:
    """Trace of the connection matrix in each chart."""
    return {name: m.trace() for name, m in atlas.connection_matrices.items()}


def _dlog_det(b: FunctionMatrix) -> CurveForm:
    det = b.det()
    return CurveForm.exact(det).times(det.reciprocal())


@dataclass(frozen=True)
class TraceReport:
    residuals: dict[str, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.residuals.values(), default=0.0) < self.tolerance


def check_trace_cocycle(atlas: ConnectionAtlas, n_samples: int = 20, seed: int = 0,
                        tolerance: float = TRACE_TOLERANCE) -> TraceReport:
    """``tr A_k - tr A_0 = dlog det B_{0k}`` sampled on each overlap."""
    traces = extract_trace_section(atlas)
    residuals = {}
    for name, b in atlas.transitions.items():
        diff = traces[name] - traces["U0"] - _dlog_det(b)
        xs, ys = _both_sheets(atlas, _overlap_samples(atlas, name, max(n_samples, 1), seed))
        residuals[name] = float(np.max(np.abs(diff.evaluate(xs, ys))))
    return TraceReport(residuals, tolerance)


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    value: complex
    contributions: dict[str, complex]

    @property
    def distance(self) -> float:
        return abs(self.value - self.degree)


def line_bundle_degree(atlas: ConnectionAtlas, window: int = DEFAULT_WINDOW) -> DegreeReport:
    """Degree of the determinant bundle from winding numbers of the transitions.

    Each chart contributes the winding of ``det B_{k0} = 1 / det B_{0k}``
    around its center, i.e. minus the residue of ``dlog det B_{0k}``.
    """
    contributions = {}
    for name, b in atlas.transitions.items():
        contributions[name] = -form_residue(atlas.curve, _dlog_det(b), atlas.centers[name], window)
    value = complex(sum(contributions.values()))
    degree = int(round(value.real))
    if abs(value - degree) > DEGREE_TOLERANCE:
        raise GluingFailure(abs(value - degree), "line bundle degree is not an integer")
    return DegreeReport(degree, value, contributions)


@dataclass(frozen=True)
class AtlasChecks:
    gluing: GluingReport
    holomorphy: HolomorphyReport
    trace: TraceReport
    polar: PolarCheck
    degree: DegreeReport


def verify_atlas(atlas: ConnectionAtlas, n_samples: int = 20, seed: int = 0,
                 window: int = DEFAULT_WINDOW) -> AtlasChecks:
    c = atlas.companion
    return AtlasChecks(
        check_gluing(atlas, n_samples, seed),
        check_holomorphy(atlas, window),
        check_trace_cocycle(atlas, n_samples, seed),
        check_polar_spectrum(c.curve, c.spectral, (c.omega12, c.omega21, c.omega22), window=window),
        line_bundle_degree(atlas, window),
    )


def build_atlas(form: CompanionForm, verify: bool = True, n_samples: int = 20, seed: int = 0,
                window: int = DEFAULT_WINDOW) -> ConnectionAtlas:
    """Glue the atlas; with ``verify`` every compatibility check must pass."""
    atlas = assemble_atlas(form)
    if not verify:
        return atlas
    checks = verify_atlas(atlas, n_samples, seed, window)
    if not checks.gluing.passed:
        name = max(checks.gluing.residuals, key=checks.gluing.residuals.get)
        where = checks.gluing.locations[name]
        raise GluingFailure(checks.gluing.residuals[name], f"overlap U0/{name} near x = {where}")
    if not checks.holomorphy.passed:
        name = max(checks.holomorphy.residuals, key=checks.holomorphy.residuals.get)
        raise GluingFailure(checks.holomorphy.residuals[name], f"pole of the {name} matrix at its center")
    if not checks.trace.passed:
        name = max(checks.trace.residuals, key=checks.trace.residuals.get)
        raise GluingFailure(checks.trace.residuals[name], f"trace cocycle on U0/{name}")
    if not checks.polar.passed:
        raise GluingFailure(checks.polar.max_error, "eigenvalue data at the poles")
    return atlas
