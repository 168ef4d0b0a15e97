"""Canonical coordinates ``(u_j, p_j)`` of a connection and the inverse map.

``p_j`` is the accessory parameter at the ``j``-th apparent point, measured in
the local coordinate ``z_j = x - u_j``. It is computed twice: from a closed
expression in the companion coefficients, and as the residue at the point of
the chart-``Uq_j`` trace shifted by ``zeta_j w21`` and divided by ``z_j``.

Substituting the closed expression back into the apparency conditions makes
them linear in the unknowns ``(a3, a4, b3)``; this is how the inverse map
recovers ``zeta_j`` from ``p_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .atlas import ConnectionAtlas, build_atlas, extract_trace_section
from .companion import (
    N_APPARENT,
    ApparentConfig,
    ApparentPoint,
    CompanionForm,
    build_companion,
    make_config,
)
from .curve import LegendreCurve, expand_form
from .errors import DisagreementError, InvalidConfig
from .numeric import DEFAULT_WINDOW, LinearSystem, SINGULARITY_THRESHOLD, determinant, residue, solve_linear
from .rational import Rational
from .spectral import ResidueParams, SpectralData, solve_residue_params
from .validation import as_complex

__all__ = [
    "CanonicalCoords",
    "CoordPoint",
    "canonical_coordinates",
    "closed_form_momenta",
    "forward_map",
    "inverse_map",
    "reconstruction_det",
    "rescale_momentum",
    "residue_momenta",
]

AGREEMENT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class CoordPoint:
    u: complex
    v: complex
    p: complex


@dataclass(frozen=True)
class CanonicalCoords:
    """Pairs ``(u_j, p_j)`` with the branch ``v_j`` kept alongside ``u_j``.

    ``p_j`` always refers to the local coordinate ``z_j = x - u_j``.
    """

    points: tuple[CoordPoint, ...]

    @property
    def u(self) -> np.ndarray:
        return np.array([c.u for c in self.points], dtype=complex)

    @property
    def v(self) -> np.ndarray:
        return np.array([c.v for c in self.points], dtype=complex)

    @property
    def p(self) -> np.ndarray:
        return np.array([c.p for c in self.points], dtype=complex)


def _pair_weights(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``W[j, k] = (v_j + v_k) / (2 (u_j - u_k))`` off the diagonal, zero on it."""
    n = len(u)
    w = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            if j != k:
                w[j, k] = (v[j] + v[k]) / (2 * (u[j] - u[k]))
    return w


def _zeta_free_terms(curve: LegendreCurve, params: ResidueParams, t: complex,
                     u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """The part of ``p_j`` that involves neither ``zeta`` nor ``b3``."""
    w = _pair_weights(u, v)
    self_term = -curve.dK(u) / (4 * v * v)
    others = w.sum(axis=1) / v
    polar = (params.b1 + params.b2 * v) / ((u - t) * v)
    return self_term + others + polar


def closed_form_momenta(form: CompanionForm) -> np.ndarray:
    u, v, z = form.config.u, form.config.v, form.config.zeta
    base = _zeta_free_terms(form.curve, form.params, form.t, u, v)
    return z / ((u - form.t) * v) + base + form.b3 / v


def residue_momenta(atlas: ConnectionAtlas, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """``res_{q_j} (tr A_{q_j} + zeta_j w21) / (x - u_j)`` by series expansion."""
    form = atlas.companion
    traces = extract_trace_section(atlas)
    out = np.zeros(N_APPARENT, dtype=complex)
    for j, (p, cp) in enumerate(zip(form.config.points, form.config.curve_points())):
        shifted = traces[f"Uq{j + 1}"] + form.omega21.scale(p.zeta)
        out[j] = residue(expand_form(form.curve, shifted.times(Rational.pole(p.u, 1.0)), cp, window))
    return out


def canonical_coordinates(atlas: ConnectionAtlas, window: int = DEFAULT_WINDOW,
                          tolerance: float = AGREEMENT_TOLERANCE) -> CanonicalCoords:
    closed = closed_form_momenta(atlas.companion)
    series = residue_momenta(atlas, window)
    scale = max(1.0, float(np.max(np.abs(closed))))
    gap = float(np.max(np.abs(closed - series)))
    if gap > tolerance * scale:
        raise DisagreementError(f"closed-form and residue momenta differ by {gap:.3e}")
    cfg = atlas.companion.config
    return CanonicalCoords(tuple(CoordPoint(complex(pt.u), complex(pt.v), complex(pj))
                                 for pt, pj in zip(cfg.points, closed)))


def forward_map(curve: LegendreCurve, spectral: SpectralData, config: ApparentConfig,
                window: int = DEFAULT_WINDOW, verify_atlas: bool = True) -> CanonicalCoords:
    form = build_companion(curve, spectral, config, window)
    atlas = build_atlas(form, verify=verify_atlas, window=window)
    return canonical_coordinates(atlas, window)


def _reconstruction_system(curve: LegendreCurve, spectral: SpectralData, params: ResidueParams,
                           u: np.ndarray, v: np.ndarray, p: np.ndarray
                           ) -> tuple[LinearSystem, np.ndarray, np.ndarray]:
    t = spectral.t_value(curve)
    w = _pair_weights(u, v)
    shift = p + curve.dK(u) / (4 * v * v)
    alpha = (p - _zeta_free_terms(curve, params, t, u, v)) * (u - t) * v
    beta = u - t
    col = v * beta * shift - w @ beta
    rhs = v * alpha * shift - w @ alpha - (params.a1 + params.a2 * v) / (u - t)
    m = np.column_stack([np.ones(N_APPARENT, dtype=complex), u, col])
    return LinearSystem(m, rhs), alpha, beta


def reconstruction_det(curve: LegendreCurve, spectral: SpectralData, coords: CanonicalCoords) -> complex:
    params = solve_residue_params(curve, spectral)
    system, _, _ = _reconstruction_system(curve, spectral, params, coords.u, coords.v, coords.p)
    return determinant(system.matrix)


def inverse_map(curve: LegendreCurve, spectral: SpectralData, coords: CanonicalCoords,
                branch_hints: Sequence[complex], threshold: float = SINGULARITY_THRESHOLD
                ) -> ApparentConfig:
    """Recover ``zeta_j`` from ``(u_j, p_j)`` with ``v_j`` chosen nearest ``branch_hints[j]``."""
    if len(coords.points) != N_APPARENT or len(branch_hints) != N_APPARENT:
        raise InvalidConfig(f"expected {N_APPARENT} coordinate pairs and branch hints")
    for j, c in enumerate(coords.points):
        as_complex(c.p, f"p[{j}]")
    snapped = make_config(curve, spectral, [(c.u, h, 0.0) for c, h in zip(coords.points, branch_hints)])
    u, v = snapped.u, snapped.v
    params = solve_residue_params(curve, spectral)
    system, alpha, beta = _reconstruction_system(curve, spectral, params, u, v, coords.p)
    _, _, b3 = solve_linear(system, threshold=threshold, what="reconstruction determinant")
    zeta = alpha - beta * b3
    return ApparentConfig(tuple(ApparentPoint(complex(a), complex(b), complex(z))
                                for a, b, z in zip(u, v, zeta)))


def rescale_momentum(p: complex, factor: complex) -> complex:
    """Momentum in the coordinate ``factor * z_j`` given it in ``z_j``."""
    return complex(p) / complex(factor)
