"""Finite-difference check that the canonical coordinates are Darboux.

A tangent vector moves the apparent-point data ``(u, zeta)``. Re-solving the
companion system at ``+-h`` along it gives central differences of the
transition matrices ``B_{0,q_j}`` and of the connection matrices, i.e. a
deformation cocycle. Two such cocycles are paired by residues at the apparent
points, and the result is compared with ``sum_j dp_j ^ du_j`` evaluated on the
same pair through the finite-difference Jacobian of ``(u, zeta) -> (u, p)``.

Residues are taken by trapezoidal quadrature on a small circle around each
``u_j``. The integrand is meromorphic inside the circle with its only pole at
``u_j``, so the quadrature converges geometrically and avoids the
cancellation that plagues series coefficients of finite differences.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .atlas import ConnectionAtlas, FormMatrix, assemble_atlas
from .companion import (
    N_APPARENT,
    ApparentConfig,
    ApparentPoint,
    CompanionForm,
    assemble_companion,
    solve_accessory,
    stability_det,
    validate_config,
)
from .coords import closed_form_momenta
from .curve import LegendreCurve
from .errors import BasePointMismatch, InvalidInput, StepTooLarge
from .numeric import LaurentSeries, convergence_order, richardson_extrapolate
from .spectral import ResidueParams, SpectralData, solve_residue_params
from .validation import check_positive

__all__ = [
    "CocycleData",
    "Contour",
    "PairReport",
    "PairingResult",
    "SymplecticReport",
    "TangentVector",
    "cech_pairing",
    "contours",
    "coords_jacobian",
    "darboux_form",
    "displaced_config",
    "random_directions",
    "tangent_cocycles",
    "verify_symplectomorphism",
]

CONTOUR_NODES = 64
CONTOUR_FRACTION = 0.25
DEFAULT_STEPS = (1e-3, 1e-4)
PAIRING_TOLERANCE = 1e-6
MIN_ORDER = 1.8


@dataclass(frozen=True)
class TangentVector:
    """Direction ``(du_1..3, dzeta_1..3)`` in the apparent-point chart."""

    du: tuple[complex, complex, complex]
    dzeta: tuple[complex, complex, complex]

    @classmethod
    def from_array(cls, arr) -> "TangentVector":
        a = np.asarray(arr, dtype=complex).reshape(2 * N_APPARENT)
        return cls(tuple(complex(c) for c in a[:N_APPARENT]), tuple(complex(c) for c in a[N_APPARENT:]))

    @classmethod
    def basis(cls, k: int) -> "TangentVector":
        e = np.zeros(2 * N_APPARENT, dtype=complex)
        e[k] = 1.0
        return cls.from_array(e)

    def as_array(self) -> np.ndarray:
        return np.array(self.du + self.dzeta, dtype=complex)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector.from_array(self.as_array() + other.as_array())

    def scale(self, c: complex) -> "TangentVector":
        return TangentVector.from_array(self.as_array() * c)


def displaced_config(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig,
                     direction: TangentVector, eps: float) -> ApparentConfig:
    """Move ``config`` by ``eps * direction``, continuing each ``v_j`` along the curve."""
    pts = []
    for p, du, dz in zip(config.points, direction.du, direction.dzeta):
        shift = eps * du
        u = p.u + shift
        v = p.v
        if shift != 0:
            # first-order continuation picks the sheet; the value itself is exact
            hint = p.v + curve.dK(p.u) / (2 * p.v) * shift
            root = cmath.sqrt(curve.K(u))
            v = root if abs(root - hint) <= abs(root + hint) else -root
        pts.append(ApparentPoint(complex(u), complex(v), complex(p.zeta + eps * dz)))
    moved = ApparentConfig(tuple(pts))
    try:
        validate_config(curve, spectral, moved)
    except InvalidInput as exc:
        raise StepTooLarge(f"step {eps:g} leaves the valid configuration locus: {exc}") from exc
    return moved


def _companion(curve: LegendreCurve, spectral: SpectralData, params: ResidueParams,
               config: ApparentConfig) -> CompanionForm:
    a3, a4, b3 = solve_accessory(curve, spectral, config, params)
    return assemble_companion(curve, spectral, config, params, a3, a4, b3)


@dataclass(frozen=True, eq=False)
class Contour:
    center: complex
    radius: float
    x: np.ndarray
    y: np.ndarray

    @property
    def z(self) -> np.ndarray:
        return self.x - self.center


def contours(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig,
             nodes: int = CONTOUR_NODES, fraction: float = CONTOUR_FRACTION) -> list[Contour]:
    """One circle per apparent point, clear of every other special ``x``.

    ``y`` is continued from ``v_j`` as ``v_j prod_e sqrt(1 + z / (u_j - e))``
    over the roots ``e``; each factor stays in the right half plane because
    the radius is below every ``|u_j - e|``.
    """
    t = spectral.t_value(curve)
    out = []
    theta = 2 * np.pi * np.arange(nodes) / nodes
    for j, p in enumerate(config.points):
        others = list(curve.roots) + [t] + [q.u for k, q in enumerate(config.points) if k != j]
        radius = fraction * min(abs(p.u - o) for o in others)
        z = radius * np.exp(1j * theta)
        y = np.full(nodes, p.v, dtype=complex)
        for e in curve.roots:
            y = y * np.sqrt(1 + z / (p.u - e))
        out.append(Contour(p.u, radius, p.u + z, y))
    return out


def _transition_at(point: ApparentPoint, x: np.ndarray) -> np.ndarray:
    z = x - point.u
    one, zero = np.ones_like(x), np.zeros_like(x)
    return np.array([[one, point.zeta / z], [zero, 1 / z]])


def _inverse_transition_at(point: ApparentPoint, x: np.ndarray) -> np.ndarray:
    one, zero = np.ones_like(x), np.zeros_like(x)
    return np.array([[one, -point.zeta * one], [zero, x - point.u]])


@dataclass(frozen=True, eq=False)
class CocycleData:
    """Deformation cocycle along one direction, sampled on the contours.

    ``u_nodes[j]`` is ``B^-1 dB`` for ``B = B_{0,q_j}``; ``vq_nodes[j]`` and
    ``v0_nodes[j]`` are the derivatives of the ``Uq_j`` and ``U0`` connection
    matrices. Arrays have shape ``(2, 2, nodes)``.
    """

    base: ApparentConfig
    direction: TangentVector
    step: float
    contours: tuple[Contour, ...]
    u_nodes: tuple[np.ndarray, ...]
    vq_nodes: tuple[np.ndarray, ...]
    v0_nodes: tuple[np.ndarray, ...]
    v_blocks: tuple[FormMatrix, ...] = field(repr=False)

    def u_block(self, j: int, lowest: int = -2, highest: int = 4) -> list[list[LaurentSeries]]:
        """Laurent coefficients in ``z_j`` of ``u_nodes[j]`` from the node samples."""
        c = self.contours[j]
        z = c.z
        grid = []
        for a in range(2):
            row = []
            for b in range(2):
                coeffs = [np.mean(self.u_nodes[j][a, b] * z ** (-k)) for k in range(lowest, highest + 1)]
                row.append(LaurentSeries(lowest, coeffs, trim=False))
            grid.append(row)
        return grid


def _difference(plus: ConnectionAtlas, minus: ConnectionAtlas, name: str, h: float) -> FormMatrix:
    return (plus.connection_matrices[name] - minus.connection_matrices[name]).scale(1 / (2 * h))


def tangent_cocycles(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig,
                     direction: TangentVector, h: float, nodes: int = CONTOUR_NODES,
                     params: ResidueParams | None = None) -> CocycleData:
    check_positive(h, "h")
    if params is None:
        params = solve_residue_params(curve, spectral)
    rings = tuple(contours(curve, spectral, config, nodes))
    plus_cfg = displaced_config(curve, spectral, config, direction, h)
    minus_cfg = displaced_config(curve, spectral, config, direction, -h)
    plus = assemble_atlas(_companion(curve, spectral, params, plus_cfg))
    minus = assemble_atlas(_companion(curve, spectral, params, minus_cfg))
    u_nodes, vq_nodes, v0_nodes, blocks = [], [], [], []
    dv0 = _difference(plus, minus, "U0", h)
    for j, ring in enumerate(rings):
        db = (_transition_at(plus_cfg.points[j], ring.x) - _transition_at(minus_cfg.points[j], ring.x)) / (2 * h)
        u_nodes.append(np.einsum("abm,bcm->acm", _inverse_transition_at(config.points[j], ring.x), db))
        dvq = _difference(plus, minus, f"Uq{j + 1}", h)
        blocks.append(dvq)
        vq_nodes.append(dvq.evaluate(ring.x, ring.y))
        v0_nodes.append(dv0.evaluate(ring.x, ring.y))
    return CocycleData(config, direction, float(h), rings, tuple(u_nodes), tuple(vq_nodes),
                       tuple(v0_nodes), tuple(blocks))


def _trace(m: np.ndarray) -> np.ndarray:
    return m[0, 0] + m[1, 1]


def _trace_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("abm,bam->m", a, b)


def cech_pairing(first: CocycleData, second: CocycleData, include_det_cocycle: bool = True) -> complex:
    """``-sum_j res_{q_j} [tr(u v') - tr(v u')]`` over the apparent points.

    With ``include_det_cocycle=False`` the product of the trace parts is
    removed from the integrand, which leaves the pairing of the trace-free
    parts alone.
    """
    if first.base is not second.base and first.base != second.base:
        raise BasePointMismatch("cocycles were computed at different base configurations")
    if first.step != second.step or len(first.contours) != len(second.contours):
        raise BasePointMismatch("cocycles use different steps or contours")
    total = 0j
    for j, ring in enumerate(first.contours):
        u1, v1 = first.u_nodes[j], first.v0_nodes[j]
        u2, v2 = second.u_nodes[j], second.vq_nodes[j]
        phi = _trace_product(u1, v2) - _trace_product(v1, u2)
        if not include_det_cocycle:
            phi = phi - (_trace(u1) * _trace(v2) - _trace(v1) * _trace(u2))
        total += np.mean(phi * ring.z)
    return complex(-total)


def coords_jacobian(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig, h: float,
                    params: ResidueParams | None = None) -> np.ndarray:
    """Central-difference Jacobian of ``(u, zeta) -> (u, p)``, a 6x6 complex matrix."""
    check_positive(h, "h")
    if params is None:
        params = solve_residue_params(curve, spectral)
    n = 2 * N_APPARENT
    jac = np.zeros((n, n), dtype=complex)
    for k in range(n):
        e = TangentVector.basis(k)
        vals = []
        for sign in (1.0, -1.0):
            cfg = displaced_config(curve, spectral, config, e, sign * h)
            p = closed_form_momenta(_companion(curve, spectral, params, cfg))
            vals.append(np.concatenate([cfg.u, p]))
        jac[:, k] = (vals[0] - vals[1]) / (2 * h)
    return jac


def darboux_form(jacobian: np.ndarray, first: TangentVector, second: TangentVector) -> complex:
    """``sum_j (v(p_j) v'(u_j) - v(u_j) v'(p_j))``."""
    a = jacobian @ first.as_array()
    b = jacobian @ second.as_array()
    n = N_APPARENT
    return complex(np.sum(a[n:] * b[:n] - a[:n] * b[n:]))


def random_directions(n_pairs: int, seed: int) -> list[tuple[TangentVector, TangentVector]]:
    """Pairs of directions drawn uniformly from the unit ball of ``C^6``."""
    rng = np.random.default_rng(seed)
    dim = 2 * N_APPARENT
    out = []
    for _ in range(n_pairs):
        pair = []
        for _ in range(2):
            g = rng.standard_normal(2 * dim)
            g *= rng.random() ** (1 / (2 * dim)) / np.linalg.norm(g)
            pair.append(TangentVector.from_array(g[:dim] + 1j * g[dim:]))
        out.append(tuple(pair))
    return out


@dataclass(frozen=True)
class PairingResult:
    cech_value: complex
    darboux_value: complex
    fd_step: float

    @property
    def residual(self) -> float:
        return abs(self.cech_value - self.darboux_value)


@dataclass(frozen=True)
class PairReport:
    index: int
    results: tuple[PairingResult, ...]
    extrapolated_residual: float
    order: float

    @property
    def magnitude(self) -> float:
        return abs(self.results[-1].darboux_value)


@dataclass(frozen=True)
class SymplecticReport:
    pairs: tuple[PairReport, ...]
    steps: tuple[float, ...]
    seed: int
    tolerance: float
    min_order: float
    include_det_cocycle: bool
    stability_det: complex

    @property
    def max_extrapolated_residual(self) -> float:
        return max(p.extrapolated_residual for p in self.pairs)

    @property
    def min_measured_order(self) -> float:
        return min(p.order for p in self.pairs)

    @property
    def passed(self) -> bool:
        return self.max_extrapolated_residual < self.tolerance


def verify_symplectomorphism(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig,
                             n_pairs: int = 10, steps=DEFAULT_STEPS, seed: int = 0,
                             include_det_cocycle: bool = True, nodes: int = CONTOUR_NODES,
                             tolerance: float = PAIRING_TOLERANCE) -> SymplecticReport:
    """Compare the residue pairing with ``sum dp ^ du`` on random direction pairs.

    For each pair the residual ``cech(h) - darboux(h)`` is recorded at every
    step, Richardson-extrapolated to ``h = 0`` and its observed order taken
    from the last two steps.
    """
    if n_pairs <= 0:
        raise ValueError("n_pairs must be positive")
    steps = tuple(float(h) for h in steps)
    if len(steps) < 2:
        raise ValueError("at least two steps are required for extrapolation")
    params = solve_residue_params(curve, spectral)
    validate_config(curve, spectral, config)
    directions = random_directions(n_pairs, seed)
    per_step = []
    for h in steps:
        jac = coords_jacobian(curve, spectral, config, h, params)
        rows = []
        for v1, v2 in directions:
            c1 = tangent_cocycles(curve, spectral, config, v1, h, nodes, params)
            c2 = tangent_cocycles(curve, spectral, config, v2, h, nodes, params)
            rows.append(PairingResult(cech_pairing(c1, c2, include_det_cocycle),
                                      darboux_form(jac, v1, v2), h))
        per_step.append(rows)
    pairs = []
    for i in range(n_pairs):
        results = tuple(per_step[s][i] for s in range(len(steps)))
        diffs = [r.cech_value - r.darboux_value for r in results]
        extrapolated = abs(richardson_extrapolate(diffs, steps))
        order = convergence_order([abs(d) for d in diffs], steps)
        pairs.append(PairReport(i, results, extrapolated, order))
    return SymplecticReport(tuple(pairs), steps, seed, tolerance, MIN_ORDER, include_det_cocycle,
                            stability_det(config))
