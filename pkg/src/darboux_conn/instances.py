"""Seeded random problem instances on the generic locus."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .companion import N_APPARENT, ApparentConfig, ApparentPoint, stability_det
from .curve import LegendreCurve, make_curve
from .spectral import SpectralData, irregular_spectrum, logarithmic_spectrum

__all__ = [
    "Instance",
    "irregular_instances",
    "logarithmic_instances",
    "random_config",
    "random_irregular_instance",
    "random_logarithmic_instance",
]

MIN_SEPARATION = 0.25
MIN_STABILITY = 1e-4
EXPONENT_MARGIN = 0.05


@dataclass(frozen=True, eq=False)
class Instance:
    curve: LegendreCurve
    spectral: SpectralData
    config: ApparentConfig


def _complex(rng: np.random.Generator, scale: float) -> complex:
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def _far(z: complex, others, gap: float) -> bool:
    return all(abs(z - o) >= gap for o in others)


def _near_integer(z: complex) -> bool:
    return abs(z - round(z.real)) < EXPONENT_MARGIN


def _random_lambda(rng: np.random.Generator) -> complex:
    while True:
        lam = _complex(rng, 2.5)
        if _far(lam, (0, 1), 0.4):
            return lam


def random_config(rng: np.random.Generator, curve: LegendreCurve, t: complex) -> ApparentConfig:
    """Three apparent points at least ``MIN_SEPARATION`` from everything special."""
    while True:
        us: list[complex] = []
        while len(us) < N_APPARENT:
            u = _complex(rng, 2.5)
            if _far(u, list(curve.roots) + [t] + us, MIN_SEPARATION):
                us.append(u)
        pts = []
        for u in us:
            v = cmath.sqrt(curve.K(u)) * (1 if rng.random() < 0.5 else -1)
            pts.append(ApparentPoint(u, v, _complex(rng, 1.5)))
        config = ApparentConfig(tuple(pts))
        if abs(stability_det(config)) > MIN_STABILITY:
            return config


def random_logarithmic_instance(rng: np.random.Generator) -> Instance:
    curve = make_curve(_random_lambda(rng))
    while True:
        t = _complex(rng, 2.5)
        if _far(t, curve.roots, 0.4):
            break
    while True:
        t1p, t1m, t2p = (_complex(rng, 0.8) for _ in range(3))
        t2m = -1 - t1p - t1m - t2p
        sums = [t1p - t1m, t2p - t2m] + [a + b for a in (t1p, t1m) for b in (t2p, t2m)]
        if not any(_near_integer(z) for z in sums):
            break
    s = cmath.sqrt(curve.K(t)) * (1 if rng.random() < 0.5 else -1)
    spectral = logarithmic_spectrum(curve, t, s, (t1p, t1m), (t2p, t2m))
    return Instance(curve, spectral, random_config(rng, curve, t))


def random_irregular_instance(rng: np.random.Generator, t_root: str | None = None) -> Instance:
    curve = make_curve(_random_lambda(rng))
    if t_root is None:
        t_root = ("0", "1", "lambda")[int(rng.integers(3))]
    while True:
        tp, tm = _complex(rng, 1.0), _complex(rng, 1.0)
        if abs(tp - tm) > EXPONENT_MARGIN:
            break
    spectral = irregular_spectrum(curve, t_root, (tp, tm), _complex(rng, 0.8))
    return Instance(curve, spectral, random_config(rng, curve, spectral.t_value(curve)))


def logarithmic_instances(n: int, seed: int) -> list[Instance]:
    rng = np.random.default_rng(seed)
    return [random_logarithmic_instance(rng) for _ in range(n)]


def irregular_instances(n: int, seed: int) -> list[Instance]:
    rng = np.random.default_rng(seed)
    return [random_irregular_instance(rng) for _ in range(n)]
