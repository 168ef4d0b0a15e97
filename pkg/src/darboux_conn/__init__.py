"""Rank-2 meromorphic connections on a Legendre elliptic curve.

Builds the companion connection from apparent-point data, glues it into an
explicit atlas, computes the canonical coordinates ``(u_j, p_j)`` and their
inverse, and checks numerically that those coordinates are Darboux for the
residue pairing of deformation cocycles.
"""

from .atlas import ConnectionAtlas, build_atlas, check_gluing, check_holomorphy, extract_trace_section
from .companion import (
    ApparentConfig,
    ApparentPoint,
    CompanionForm,
    build_companion,
    make_config,
    solve_accessory,
    stability_det,
    verify_apparency,
)
from .coords import CanonicalCoords, canonical_coordinates, forward_map, inverse_map
from .curve import CurveForm, CurvePoint, LegendreCurve, expand_form, lift_point, make_curve
from .errors import (
    ConstructionError,
    DarbouxConnError,
    DisagreementError,
    GluingFailure,
    InvalidInput,
    NearSingular,
)
from .numeric import LaurentSeries
from .spectral import IrregularSpectrum, LogarithmicSpectrum, irregular_spectrum, logarithmic_spectrum
from .symplectic import TangentVector, cech_pairing, verify_symplectomorphism

__version__ = "0.1.0"

__all__ = [
    "ApparentConfig",
    "ApparentPoint",
    "CanonicalCoords",
    "CompanionForm",
    "ConnectionAtlas",
    "ConstructionError",
    "CurveForm",
    "CurvePoint",
    "DarbouxConnError",
    "DisagreementError",
    "GluingFailure",
    "InvalidInput",
    "IrregularSpectrum",
    "LaurentSeries",
    "LegendreCurve",
    "LogarithmicSpectrum",
    "NearSingular",
    "TangentVector",
    "build_atlas",
    "build_companion",
    "canonical_coordinates",
    "cech_pairing",
    "check_gluing",
    "check_holomorphy",
    "expand_form",
    "extract_trace_section",
    "forward_map",
    "inverse_map",
    "irregular_spectrum",
    "lift_point",
    "logarithmic_spectrum",
    "make_config",
    "make_curve",
    "solve_accessory",
    "stability_det",
    "verify_apparency",
    "verify_symplectomorphism",
]
