"""JSON wire formats: problem files, coordinate files and reports.

Complex numbers travel as ``[re, im]``. Every document carries
``schema_version`` and is checked against the schema shipped in
``schemas/`` before any field is interpreted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema

from .companion import ApparentConfig, make_config
from .coords import CanonicalCoords, CoordPoint
from .curve import LegendreCurve, make_curve
from .errors import InvalidInput
from .spectral import (
    IrregularSpectrum,
    LogarithmicSpectrum,
    SpectralData,
    irregular_spectrum,
    logarithmic_spectrum,
)
from .validation import complex_from_pair, complex_to_pair

__all__ = [
    "DEFAULT_TOLERANCES",
    "SCHEMA_VERSION",
    "CoordsFile",
    "Problem",
    "config_to_json",
    "coords_to_json",
    "dumps",
    "load_schema",
    "parse_coords",
    "parse_problem",
    "read_json",
    "spectral_to_json",
    "validate_document",
]

SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "apparency": 1e-10,
    "residue": 1e-10,
    "gluing": 1e-9,
    "holomorphy": 1e-10,
    "agreement": 1e-10,
    "roundtrip": 1e-8,
    "pairing": 1e-6,
}


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("darboux_conn").joinpath("schemas", f"{name}.v{SCHEMA_VERSION}.json").read_text()
    return json.loads(text)


def validate_document(doc: Any, name: str) -> None:
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidInput(f"{name} document invalid at {where}: {exc.message}") from exc


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise InvalidInput(f"{path}: cannot read ({exc.strerror})") from exc


def dumps(doc: Any) -> str:
    """Canonical serialization; byte-identical for identical documents."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _pair_of_complex(raw: list, name: str) -> tuple[complex, complex]:
    return complex_from_pair(raw[0], f"{name}[0]"), complex_from_pair(raw[1], f"{name}[1]")


def parse_spectral(curve: LegendreCurve, raw: dict) -> SpectralData:
    if raw["kind"] == "logarithmic":
        return logarithmic_spectrum(curve, complex_from_pair(raw["t"], "t"),
                                    complex_from_pair(raw["s_branch"], "s_branch"),
                                    _pair_of_complex(raw["theta1"], "theta1"),
                                    _pair_of_complex(raw["theta2"], "theta2"))
    return irregular_spectrum(curve, raw["t_root"], _pair_of_complex(raw["theta_m2"], "theta_m2"),
                              complex_from_pair(raw["theta_m1_plus"], "theta_m1_plus"))


def spectral_to_json(data: SpectralData) -> dict:
    if isinstance(data, LogarithmicSpectrum):
        return {
            "kind": "logarithmic",
            "t": complex_to_pair(data.t),
            "s_branch": complex_to_pair(data.s),
            "theta1": [complex_to_pair(data.theta1_plus), complex_to_pair(data.theta1_minus)],
            "theta2": [complex_to_pair(data.theta2_plus), complex_to_pair(data.theta2_minus)],
        }
    assert isinstance(data, IrregularSpectrum)
    return {
        "kind": "irregular",
        "t_root": data.t_root,
        "theta_m2": [complex_to_pair(data.theta_m2_plus), complex_to_pair(data.theta_m2_minus)],
        "theta_m1_plus": complex_to_pair(data.theta_m1_plus),
    }


def config_to_json(config: ApparentConfig) -> list[dict]:
    return [{"u": complex_to_pair(p.u), "v_branch": complex_to_pair(p.v), "zeta": complex_to_pair(p.zeta)}
            for p in config.points]


def coords_to_json(coords: CanonicalCoords) -> list[dict]:
    return [{"u": complex_to_pair(c.u), "v_branch": complex_to_pair(c.v), "p": complex_to_pair(c.p)}
            for c in coords.points]


def _tolerances(raw: dict | None) -> dict[str, float]:
    out = dict(DEFAULT_TOLERANCES)
    out.update({k: float(v) for k, v in (raw or {}).items()})
    return out


@dataclass(frozen=True, eq=False)
class Problem:
    curve: LegendreCurve
    spectral: SpectralData
    config: ApparentConfig
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "lambda": complex_to_pair(self.curve.lam),
            "spectral": spectral_to_json(self.spectral),
            "apparent": config_to_json(self.config),
        }


def parse_problem(doc: Any) -> Problem:
    validate_document(doc, "problem")
    curve = make_curve(complex_from_pair(doc["lambda"], "lambda"))
    spectral = parse_spectral(curve, doc["spectral"])
    config = make_config(curve, spectral, [
        (complex_from_pair(p["u"], f"apparent[{j}].u"), complex_from_pair(p["v_branch"], f"apparent[{j}].v_branch"),
         complex_from_pair(p["zeta"], f"apparent[{j}].zeta"))
        for j, p in enumerate(doc["apparent"])])
    return Problem(curve, spectral, config, _tolerances(doc.get("tolerances")))


@dataclass(frozen=True, eq=False)
class CoordsFile:
    curve: LegendreCurve
    spectral: SpectralData
    coords: CanonicalCoords
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))


def parse_coords(doc: Any) -> CoordsFile:
    validate_document(doc, "coords")
    validate_document({"schema_version": doc["schema_version"], "lambda": doc["lambda"],
                       "spectral": doc["spectral"], "apparent": [
                           {"u": c["u"], "v_branch": c["v_branch"], "zeta": [0, 0]} for c in doc["coords"]]},
                      "problem")
    curve = make_curve(complex_from_pair(doc["lambda"], "lambda"))
    spectral = parse_spectral(curve, doc["spectral"])
    coords = CanonicalCoords(tuple(
        CoordPoint(complex_from_pair(c["u"], f"coords[{j}].u"),
                   complex_from_pair(c["v_branch"], f"coords[{j}].v_branch"),
                   complex_from_pair(c["p"], f"coords[{j}].p"))
        for j, c in enumerate(doc["coords"])))
    return CoordsFile(curve, spectral, coords, _tolerances(doc.get("tolerances")))
