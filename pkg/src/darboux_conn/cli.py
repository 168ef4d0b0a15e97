"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a verification fails, 2 when
the input is unreadable, invalid or sits on a degenerate locus.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Any, Callable, Sequence

import numpy as np

from .atlas import assemble_atlas, check_gluing, check_holomorphy, check_trace_cocycle, line_bundle_degree
from .companion import (
    CompanionForm,
    assemble_companion,
    companion_residue_report,
    solve_accessory,
    stability_det,
    verify_apparency,
)
from .coords import (
    canonical_coordinates,
    closed_form_momenta,
    forward_map,
    inverse_map,
    reconstruction_det,
    residue_momenta,
)
from .errors import ConstructionError, DarbouxConnError, InvalidInput, NearSingular
from .fileio import (
    SCHEMA_VERSION,
    Problem,
    config_to_json,
    coords_to_json,
    dumps,
    parse_coords,
    parse_problem,
    read_json,
    spectral_to_json,
    validate_document,
)
from .spectral import check_polar_spectrum, solve_residue_params
from .symplectic import DEFAULT_STEPS, verify_symplectomorphism
from .validation import complex_to_pair

__all__ = ["main"]

SEED_ENV = "DARBOUX_CONN_SEED"
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _num(x: float) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _pairs(values) -> list[list[float]]:
    return [complex_to_pair(v) for v in values]


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise InvalidInput(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


def _companion_block(problem: Problem) -> tuple[CompanionForm, dict, bool]:
    curve, spectral, config, tol = problem.curve, problem.spectral, problem.config, problem.tolerances
    params = solve_residue_params(curve, spectral)
    a3, a4, b3 = solve_accessory(curve, spectral, config, params)
    form = assemble_companion(curve, spectral, config, params, a3, a4, b3)
    app = verify_apparency(form, tolerance=tol["apparency"])
    res = companion_residue_report(form)
    want = [np.array([[0, p.zeta], [0, 1]]) for p in config.points]
    residue_err = max(float(np.max(np.abs(m - w))) / max(1.0, abs(p.zeta))
                      for m, w, p in zip(res["residue_matrices"], want, config.points))
    residue_err = max(residue_err, abs(res["res_infinity_omega22"] + 2))
    polar = check_polar_spectrum(curve, spectral, (form.omega12, form.omega21, form.omega22),
                                 tol=tol.get("spectral"))
    block = {
        "residue_params": {k: complex_to_pair(getattr(params, k)) for k in ("a1", "a2", "b1", "b2")},
        "accessory": {"a3": complex_to_pair(a3), "a4": complex_to_pair(a4), "b3": complex_to_pair(b3)},
        "stability_det": complex_to_pair(stability_det(config)),
        "c_values": _pairs(form.c_values),
        "scale": form.scale,
        "apparency_residuals": list(app.residuals),
        "residue_matrices": [[_pairs(row) for row in m] for m in res["residue_matrices"]],
        "res_q_omega22": _pairs(m[1, 1] for m in res["residue_matrices"]),
        "res_infinity_omega22": complex_to_pair(res["res_infinity_omega22"]),
        "residue_error": residue_err,
        "polar": {
            "passed": polar.passed,
            "max_error": polar.max_error,
            "measured": {k: _pairs(v) for k, v in polar.measured.items()},
            "expected": {k: _pairs(v) for k, v in polar.expected.items()},
        },
    }
    ok = app.passed and residue_err < tol["residue"] and polar.passed
    return form, block, ok


def cmd_solve(args: argparse.Namespace) -> tuple[dict, bool]:
    problem = parse_problem(read_json(args.input))
    if args.tol is not None:
        problem.tolerances["apparency"] = args.tol
    _, block, ok = _companion_block(problem)
    return {"inputs": problem.to_json(), "results": block, "tolerances": problem.tolerances}, ok


def cmd_verify(args: argparse.Namespace) -> tuple[dict, bool]:
    problem = parse_problem(read_json(args.input))
    tol = problem.tolerances
    if args.tol is not None:
        tol["gluing"] = args.tol
    seed = _seed(args)
    form, block, ok = _companion_block(problem)
    atlas = assemble_atlas(form)
    gluing = check_gluing(atlas, n_samples=args.samples, seed=seed, tolerance=tol["gluing"])
    holo = check_holomorphy(atlas, tolerance=tol["holomorphy"])
    trace = check_trace_cocycle(atlas, n_samples=max(args.samples, 1), seed=seed)
    degree = line_bundle_degree(atlas)
    closed = closed_form_momenta(form)
    series = residue_momenta(atlas)
    gap = float(np.max(np.abs(closed - series))) / max(1.0, float(np.max(np.abs(closed))))
    coords = canonical_coordinates(atlas, tolerance=tol["agreement"])
    back = inverse_map(problem.curve, problem.spectral, coords, coords.v)
    zeta = problem.config.zeta
    zeta_err = float(np.max(np.abs(back.zeta - zeta))) / max(1.0, float(np.max(np.abs(zeta))))
    again = forward_map(problem.curve, problem.spectral, back)
    p_err = float(np.max(np.abs(again.p - coords.p))) / max(1.0, float(np.max(np.abs(coords.p))))
    results = {
        "companion": block,
        "gluing": {"residuals": gluing.residuals,
                   "locations": {k: complex_to_pair(v) for k, v in gluing.locations.items()},
                   "samples_per_overlap": gluing.n_samples, "warnings": list(gluing.warnings)},
        "holomorphy": holo.residuals,
        "trace_cocycle": trace.residuals,
        "line_bundle_degree": {"degree": degree.degree, "value": complex_to_pair(degree.value),
                               "distance": degree.distance,
                               "contributions": {k: complex_to_pair(v) for k, v in degree.contributions.items()}},
        "momenta": {"closed_form": _pairs(closed), "residue": _pairs(series), "relative_gap": gap},
        "roundtrip": {"zeta_error": zeta_err, "p_error": p_err},
    }
    ok = (ok and gluing.passed and holo.passed and trace.passed and degree.distance < 1e-8
          and gap < tol["agreement"] and max(zeta_err, p_err) < tol["roundtrip"])
    return {"inputs": problem.to_json(), "results": results, "tolerances": tol, "seed": seed}, ok


def cmd_coords(args: argparse.Namespace) -> tuple[dict, bool]:
    problem = parse_problem(read_json(args.input))
    if args.tol is not None:
        problem.tolerances["agreement"] = args.tol
    coords = forward_map(problem.curve, problem.spectral, problem.config)
    doc = {
        "lambda": complex_to_pair(problem.curve.lam),
        "spectral": spectral_to_json(problem.spectral),
        "coords": coords_to_json(coords),
        "inputs": problem.to_json(),
    }
    return doc, True


def cmd_invert(args: argparse.Namespace) -> tuple[dict, bool]:
    data = parse_coords(read_json(args.input))
    tol = data.tolerances
    if args.tol is not None:
        tol["roundtrip"] = args.tol
    config = inverse_map(data.curve, data.spectral, data.coords, data.coords.v)
    again = forward_map(data.curve, data.spectral, config)
    p = data.coords.p
    err = float(np.max(np.abs(again.p - p))) / max(1.0, float(np.max(np.abs(p))))
    doc = {
        "lambda": complex_to_pair(data.curve.lam),
        "spectral": spectral_to_json(data.spectral),
        "apparent": config_to_json(config),
        "results": {"reconstruction_det": complex_to_pair(reconstruction_det(data.curve, data.spectral, data.coords)),
                    "forward_p_error": err},
        "tolerances": tol,
    }
    return doc, err < tol["roundtrip"]


def _steps(args: argparse.Namespace) -> tuple[float, ...]:
    if args.steps:
        steps = tuple(args.steps)
    elif args.fd_step is not None:
        steps = (10 * args.fd_step, args.fd_step)
    else:
        steps = DEFAULT_STEPS
    if len(steps) < 2 or any(not (h > 0 and math.isfinite(h)) for h in steps):
        raise InvalidInput("--steps needs at least two positive finite values")
    return steps


def cmd_symp_check(args: argparse.Namespace) -> tuple[dict, bool]:
    if args.pairs <= 0:
        raise InvalidInput("--pairs must be positive; a vacuous run is rejected")
    problem = parse_problem(read_json(args.input))
    tol = problem.tolerances
    if args.tol is not None:
        tol["pairing"] = args.tol
    seed = _seed(args)
    steps = _steps(args)
    report = verify_symplectomorphism(problem.curve, problem.spectral, problem.config, n_pairs=args.pairs,
                                      steps=steps, seed=seed, tolerance=tol["pairing"])
    pairs = [{
        "index": p.index,
        "results": [{"step": r.fd_step, "cech": complex_to_pair(r.cech_value),
                     "darboux": complex_to_pair(r.darboux_value), "residual": r.residual} for r in p.results],
        "extrapolated_residual": p.extrapolated_residual,
        "order": _num(p.order),
    } for p in report.pairs]
    results = {
        "steps": list(steps),
        "pairs": pairs,
        "max_extrapolated_residual": report.max_extrapolated_residual,
        "min_order": _num(report.min_measured_order),
        "order_below_minimum": bool(report.min_measured_order < report.min_order),
        "stability_det": complex_to_pair(report.stability_det),
    }
    return {"inputs": problem.to_json(), "results": results, "tolerances": tol, "seed": seed}, report.passed


COMMANDS: dict[str, Callable[[argparse.Namespace], tuple[dict, bool]]] = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "coords": cmd_coords,
    "invert": cmd_invert,
    "symp-check": cmd_symp_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="darboux-conn",
                                     description="Companion connections on a Legendre elliptic curve.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="problem JSON (coords JSON for invert)")
    common.add_argument("--output", help="report path; stdout when omitted")
    common.add_argument("--tol", type=float, help="override the command's primary tolerance")
    common.add_argument("--seed", type=int, help=f"sampling seed; falls back to ${SEED_ENV}, then 0")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve the companion system and check residues")
    verify = sub.add_parser("verify", parents=[common], help="full atlas, coordinate and roundtrip checks")
    verify.add_argument("--samples", type=int, default=20, help="overlap samples per chart")
    sub.add_parser("coords", parents=[common], help="canonical coordinates (u_j, p_j)")
    sub.add_parser("invert", parents=[common], help="recover apparent data from coordinates")
    symp = sub.add_parser("symp-check", parents=[common], help="residue pairing against sum dp ^ dq")
    symp.add_argument("--pairs", type=int, default=10, help="number of random direction pairs")
    symp.add_argument("--steps", type=float, nargs="+", help="finite-difference steps, largest first")
    symp.add_argument("--fd-step", type=float, help="smallest step; the larger one is ten times it")
    return parser


def _emit(doc: dict, path: str | None) -> None:
    text = dumps(doc)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    base: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "command": args.command}
    try:
        body, ok = COMMANDS[args.command](args)
        code = EXIT_PASS if ok else EXIT_FAIL
    except (InvalidInput, NearSingular) as exc:
        body, ok, code = {"error": {"type": type(exc).__name__, "message": str(exc)}}, False, EXIT_INPUT
        print(f"error: {exc}", file=sys.stderr)
    except (ConstructionError, DarbouxConnError) as exc:
        body, ok, code = {"error": {"type": type(exc).__name__, "message": str(exc)}}, False, EXIT_FAIL
        print(f"error: {exc}", file=sys.stderr)
    doc = {**base, **body, "pass": ok}
    validate_document(doc, "report")
    try:
        _emit(doc, args.output)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
