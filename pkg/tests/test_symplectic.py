from __future__ import annotations

import numpy as np
import pytest

from darboux_conn.coords import closed_form_momenta
from darboux_conn.companion import build_companion
from darboux_conn.errors import BasePointMismatch, StepTooLarge
from darboux_conn.symplectic import (
    TangentVector,
    cech_pairing,
    contours,
    coords_jacobian,
    darboux_form,
    displaced_config,
    random_directions,
    tangent_cocycles,
    verify_symplectomorphism,
)
from conftest import sample_config

H = 1e-4


@pytest.fixture(scope="module")
def directions():
    return random_directions(3, seed=7)


def test_random_directions_in_unit_ball(directions):
    for v, w in directions:
        assert np.linalg.norm(v.as_array()) <= 1 and np.linalg.norm(w.as_array()) <= 1
    assert [v.as_array().tolist() for v, _ in random_directions(3, 7)] == \
        [v.as_array().tolist() for v, _ in directions]


def test_tangent_dimension():
    assert TangentVector.basis(5).as_array().shape == (6,)
    with pytest.raises(IndexError):
        TangentVector.basis(6)


def test_contours_avoid_other_points(lam2, log_data, log_config):
    special = list(lam2.roots) + [log_data.t] + list(log_config.u)
    for ring in contours(lam2, log_data, log_config):
        others = [s for s in special if abs(s - ring.center) > 0]
        assert ring.radius < min(abs(s - ring.center) for s in others)
        assert np.allclose(ring.y ** 2, lam2.K(ring.x), rtol=1e-12)


def test_zero_direction_zero_blocks(lam2, log_data, log_config):
    c = tangent_cocycles(lam2, log_data, log_config, TangentVector.from_array(np.zeros(6)), H)
    for arrays in (c.u_nodes, c.vq_nodes, c.v0_nodes):
        for a in arrays:
            assert np.max(np.abs(a)) == 0


def _u_block(lam2, log_data, log_config, h, k):
    c = tangent_cocycles(lam2, log_data, log_config, TangentVector.basis(k), h)
    grid = c.u_block(0, lowest=-4, highest=3)
    return np.array([[grid[a][b].dense(-4, 3) for b in range(2)] for a in range(2)])


def test_u_block_closed_form_zeta_direction(lam2, log_data, log_config):
    # a zeta move enters the transition linearly, so differences are exact
    got = _u_block(lam2, log_data, log_config, 1e-3, 3)
    want = np.zeros_like(got)
    want[0, 1, 3] = 1.0
    assert np.max(np.abs(got - want)) < 1e-9


def test_u_block_closed_form_u_direction(lam2, log_data, log_config):
    # the central difference of 1/(x - u) leaves h**2 / z**3 in the lower-right entry
    for h in (1e-2, 1e-3):
        got = _u_block(lam2, log_data, log_config, h, 0)
        want = np.zeros_like(got)
        want[1, 1, 3] = 1.0
        want[1, 1, 1] = h * h
        assert np.max(np.abs(got - want)) < 1e-9
        assert abs(got[1, 1, 1] - h * h) < 1e-6 * h * h


def test_pairing_antisymmetric(lam2, log_data, log_config, directions):
    v, w = directions[0]
    cv = tangent_cocycles(lam2, log_data, log_config, v, H)
    cw = tangent_cocycles(lam2, log_data, log_config, w, H)
    # antisymmetry is exact only through the cocycle identity, so quadrature noise remains
    scale = abs(cech_pairing(cv, cw))
    assert abs(cech_pairing(cv, cv)) < 1e-9 * scale
    assert abs(cech_pairing(cv, cw) + cech_pairing(cw, cv)) < 1e-9 * scale


def test_pairing_bilinear(lam2, log_data, log_config, directions):
    v, w1 = directions[0]
    _, w2 = directions[1]
    a, b = 0.3 - 0.2j, -0.5 + 0.1j
    cv = tangent_cocycles(lam2, log_data, log_config, v, H)
    c1 = tangent_cocycles(lam2, log_data, log_config, w1, H)
    c2 = tangent_cocycles(lam2, log_data, log_config, w2, H)
    cs = tangent_cocycles(lam2, log_data, log_config, w1.scale(a) + w2.scale(b), H)
    lhs = cech_pairing(cv, cs)
    rhs = a * cech_pairing(cv, c1) + b * cech_pairing(cv, c2)
    assert abs(lhs - rhs) < 1e-6


def test_pairing_base_mismatch(lam2, log_data, log_config, directions):
    v, w = directions[0]
    other = sample_config(lam2, log_data, [(0.9 - 0.6j, 1.2), (-0.4 + 1.3j, 0.3j), (1.7 + 0.9j, -0.8)])
    with pytest.raises(BasePointMismatch):
        cech_pairing(tangent_cocycles(lam2, log_data, log_config, v, H),
                     tangent_cocycles(lam2, log_data, other, w, H))


def test_darboux_form_coordinate_directions(lam2, log_data, log_config):
    jac = coords_jacobian(lam2, log_data, log_config, H)
    eu, ez = TangentVector.basis(0), TangentVector.basis(3)
    assert abs(darboux_form(jac, eu, ez) + jac[3, 3]) < 1e-10 * abs(jac[3, 3])
    assert darboux_form(jac, eu, eu) == 0


def test_jacobian_structure(lam2, log_data, log_config):
    jac = coords_jacobian(lam2, log_data, log_config, H)
    assert jac.shape == (6, 6)
    assert np.allclose(jac[:3, :3], np.eye(3), atol=1e-12)
    assert np.allclose(jac[:3, 3:], 0, atol=0)


def test_jacobian_matches_one_sided_estimate(lam2, log_data, log_config):
    jac = coords_jacobian(lam2, log_data, log_config, H)
    form0 = build_companion(lam2, log_data, log_config)
    moved = displaced_config(lam2, log_data, log_config, TangentVector.basis(4), 1e-7)
    slope = (closed_form_momenta(build_companion(lam2, log_data, moved)) - closed_form_momenta(form0)) / 1e-7
    assert np.max(np.abs(slope - jac[3:, 4])) < 1e-5 * max(1.0, np.max(np.abs(slope)))


def test_step_too_large(lam2, log_data, log_config):
    # moving the first point by its full distance to x = 0 lands on a branch point
    direction = TangentVector.from_array([-log_config.u[0], 0, 0, 0, 0, 0])
    with pytest.raises(StepTooLarge):
        displaced_config(lam2, log_data, log_config, direction, 1.0)


def test_symplectic_small_run(lam2, log_data, log_config):
    rep = verify_symplectomorphism(lam2, log_data, log_config, n_pairs=2, seed=3)
    assert rep.passed and rep.max_extrapolated_residual < 1e-6
    assert rep.min_measured_order >= 1.8


def test_symplectic_irregular(lam2, irr_data, irr_config):
    rep = verify_symplectomorphism(lam2, irr_data, irr_config, n_pairs=2, seed=3)
    assert rep.passed


def test_symplectic_rejects_vacuous(lam2, log_data, log_config):
    with pytest.raises(ValueError):
        verify_symplectomorphism(lam2, log_data, log_config, n_pairs=0)
