"""Abel series solver, Fatou coordinates, and the repelling parametrization."""

import math

import numpy as np
import pytest

from hornlab.fatou import (
    DEFAULT_CONFIG,
    STATUS_CONVERGED,
    FatouConfig,
    OrbitError,
    PetalSpec,
    attracting_fatou,
    petal_membership,
    repelling_fatou,
    repelling_parametrization,
    sample_petal,
    series_pair,
    solve_abel_series,
)
from hornlab.maps import Polynomial, germ_data

CAULIFLOWER = Polynomial(coefficients=(1.0, 1.0))
CFG = DEFAULT_CONFIG


def test_abel_coefficients_oracle_for_the_quadratic():
    # Frozen order-by-order elimination done by hand: b1 = -1/2, b2 = 1/3.
    series = solve_abel_series(CAULIFLOWER, 4)
    assert series.coefficients[0] == pytest.approx(-0.5, abs=1e-12)
    assert series.coefficients[1] == pytest.approx(1.0 / 3.0, abs=1e-12)


@pytest.mark.parametrize("a", [2.0, 0.5, 1.0j, 1.0 + 2.0j])
def test_abel_coefficient_scaling_law(a):
    # b_k(z + a z^2) = a^k b_k(z + z^2), read off from the chart rescaling.
    base = solve_abel_series(CAULIFLOWER, 6)
    scaled = solve_abel_series(Polynomial(coefficients=(1.0, a)), 6)
    for k in range(1, 7):
        assert scaled.coefficients[k - 1] == pytest.approx(
            a**k * base.coefficients[k - 1], abs=1e-10
        )


def test_abel_defect_coefficients_vanish_through_matched_order():
    series = solve_abel_series(CAULIFLOWER, 8)
    res = series.abel_defect_coefficients(CAULIFLOWER)
    assert np.max(np.abs(res[: 8 + 2])) < 1e-11


@pytest.mark.parametrize("coeffs", [(1.0, 1.0), (1.0, 1.0, 1.0), (1.0, 1.0j)])
def test_abel_residual_both_directions(coeffs):
    m = Polynomial(coefficients=coeffs)
    g = germ_data(m)
    att, rep = series_pair(m, CFG.series_order_K)
    rng = np.random.default_rng(5)
    za = sample_petal(g, PetalSpec("attracting", chart_radius=30.0), 200, rng)
    v0, s0 = attracting_fatou(m, att, za, CFG)
    v1, s1 = attracting_fatou(m, att, m(za), CFG)
    assert np.all(s0 == STATUS_CONVERGED) and np.all(s1 == STATUS_CONVERGED)
    assert np.max(np.abs(v1 - v0 - 1.0)) < 1e-10
    zr = sample_petal(g, PetalSpec("repelling", chart_radius=30.0), 200, rng)
    w0 = repelling_fatou(m, rep, zr, CFG)
    w1 = repelling_fatou(m, rep, m(zr), CFG)
    assert np.max(np.abs(w1 - w0 - 1.0)) < 1e-10


def test_normalization_constant_vanishes_as_the_chart_refines():
    # Phi(z) + 1/(az) + gamma Log(-1/(az)) must tend to 0 along the axis:
    # that is exactly the "constant term 0" normalization.
    att, _ = series_pair(CAULIFLOWER, CFG.series_order_K)
    drifts = []
    for r in (1e-2, 5e-3, 2.5e-3):
        z = -r  # attracting axis of z + z^2
        val = attracting_fatou(CAULIFLOWER, att, z, CFG)
        drifts.append(abs(val + 1.0 / z + np.log(-1.0 / z)))
    assert drifts[0] < 1e-2
    assert drifts[-1] < drifts[0]
    assert drifts[-1] < 5e-3


def test_attracting_and_repelling_charts_differ_by_minus_i_pi_gamma():
    # In the upper overlap region the normalized charts satisfy
    # Phi_A - Phi_R = -i pi gamma exactly (upper sign of the expansion).
    for coeffs in ((1.0, 1.0), (1.0, 1.0, 1.0)):
        m = Polynomial(coefficients=coeffs)
        g = germ_data(m)
        att, rep = series_pair(m, CFG.series_order_K)
        z = 1j * 2e-3 / g.a  # upper cone between the axes
        va = attracting_fatou(m, att, z, CFG)
        vr = repelling_fatou(m, rep, z, CFG)
        assert abs((va - vr) - (-1j * math.pi * g.gamma)) < 1e-9


def test_stopping_index_independence():
    # Halving the trap radius changes the trap entry index but not the value.
    att, rep = series_pair(CAULIFLOWER, CFG.series_order_K)
    tight = FatouConfig(
        series_order_K=CFG.series_order_K,
        trap_radius=CFG.trap_radius / 2.0,
        trap_angle=CFG.trap_angle,
        max_iterations=CFG.max_iterations,
        target_tol=CFG.target_tol,
    )
    z = -0.08 + 0.03j
    assert abs(attracting_fatou(CAULIFLOWER, att, z, CFG) - attracting_fatou(CAULIFLOWER, att, z, tight)) < 1e-10
    zr = 0.05 + 0.02j
    assert abs(repelling_fatou(CAULIFLOWER, rep, zr, CFG) - repelling_fatou(CAULIFLOWER, rep, zr, tight)) < 1e-10


def test_repelling_round_trip():
    _, rep = series_pair(CAULIFLOWER, CFG.series_order_K)
    rng = np.random.default_rng(0)
    w = -25.0 - 10.0 * rng.random(100) + 1j * (8.0 * rng.random(100) - 4.0)
    z = repelling_parametrization(CAULIFLOWER, rep, w, CFG)
    back = repelling_fatou(CAULIFLOWER, rep, z, CFG)
    assert np.max(np.abs(back - w)) < 1e-10


def test_extended_parametrization_shift_property():
    # Psi_R^ext(w + 1) = f(Psi_R^ext(w)) everywhere on the domain.
    _, rep = series_pair(CAULIFLOWER, CFG.series_order_K)
    for w in (-3.0 + 0.5j, 1.2 + 2.8j, 0.4 - 3.1j):
        left = repelling_parametrization(CAULIFLOWER, rep, w + 1.0, CFG)
        right = CAULIFLOWER(repelling_parametrization(CAULIFLOWER, rep, w, CFG))
        assert abs(left - right) < 1e-9


def test_extended_parametrization_is_shift_index_independent():
    # Moving the chart cutoff (via a larger K, hence larger R_rep) must not
    # change the value.
    _, rep10 = series_pair(CAULIFLOWER, 10)
    _, rep14 = series_pair(CAULIFLOWER, 14)
    cfg14 = FatouConfig(series_order_K=14)
    for w in (0.3 + 3.0j, -5.5 - 2.0j):
        v1 = repelling_parametrization(CAULIFLOWER, rep10, w, CFG)
        v2 = repelling_parametrization(CAULIFLOWER, rep14, w, cfg14)
        assert abs(v1 - v2) < 1e-9


def test_attracting_fatou_error_paths():
    att, _ = series_pair(CAULIFLOWER, CFG.series_order_K)
    with pytest.raises(OrbitError):
        attracting_fatou(CAULIFLOWER, att, 1.0 + 0j, CFG)  # escapes along the repelling axis
    with pytest.raises(ValueError):
        attracting_fatou(CAULIFLOWER, att, 0j, CFG)


def test_petal_membership_and_sampling():
    g = germ_data(CAULIFLOWER)
    petal = PetalSpec("attracting", alpha=0.5 * math.pi, chart_radius=20.0)
    assert petal_membership(g, petal, -0.01)
    assert not petal_membership(g, petal, 0.01)  # repelling side
    with pytest.raises(ValueError):
        petal_membership(g, petal, 0.0)
    rng = np.random.default_rng(1)
    zs = sample_petal(g, petal, 300, rng)
    assert all(petal_membership(g, petal, z) for z in zs)
    # sampled petal points trap without escaping
    att, _ = series_pair(CAULIFLOWER, CFG.series_order_K)
    _, status = attracting_fatou(CAULIFLOWER, att, zs, CFG)
    assert np.all(status == STATUS_CONVERGED)


def test_config_validation_and_json_round_trip():
    with pytest.raises(ValueError):
        FatouConfig(series_order_K=1)
    with pytest.raises(ValueError):
        FatouConfig(trap_radius=-1.0)
    doc = CFG.to_json()
    assert FatouConfig.from_json(doc) == CFG
