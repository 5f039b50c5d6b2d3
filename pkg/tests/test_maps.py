"""Germ catalog, Taylor extraction, residue quadrature, and Newton inversion."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hornlab.maps import (
    BlaschkeFinite,
    BlaschkeInfinite,
    Conjugated,
    DomainError,
    Iterated,
    Moebius,
    Polynomial,
    evaluate,
    germ_data,
    iterative_residue_contour,
    load_catalog,
    local_inverse,
    map_from_json,
    normalize_germ,
    taylor_coefficients,
)

CAULIFLOWER = Polynomial(coefficients=(1.0, 1.0))
CUBIC = Polynomial(coefficients=(1.0, 1.0, 1.0))


def test_polynomial_evaluation_matches_horner_by_hand():
    f = Polynomial(coefficients=(1.0, 0.5, 0.25))
    z = 0.3 + 0.1j
    assert f(z) == pytest.approx(z + 0.5 * z**2 + 0.25 * z**3)
    assert f.deriv(z) == pytest.approx(1.0 + z + 0.75 * z**2)


def test_evaluate_rejects_points_outside_the_trusted_disk():
    with pytest.raises(DomainError):
        evaluate(CAULIFLOWER, 7.0 + 0j)
    assert evaluate(CAULIFLOWER, 0.1) == pytest.approx(0.11)


def test_taylor_coefficients_exact_for_polynomials():
    coeffs = taylor_coefficients(Polynomial(coefficients=(1.0, 2.0, 3.0)), 5)
    assert coeffs == [1.0, 2.0, 3.0, 0.0, 0.0]


def test_taylor_coefficients_sampled_path_matches_exact_path():
    # Evaluate the same polynomial through a wrapper that hides its type, so
    # the discrete Cauchy-integral path runs, and compare against the exact one.
    inner = Polynomial(coefficients=(1.0, 0.5, 0.25, 0.125))
    wrapped = Iterated(inner=inner, m=1)
    got = taylor_coefficients(wrapped, 6)
    want = taylor_coefficients(inner, 6)
    assert np.allclose(got, want, atol=1e-12)


def test_sampled_taylor_order_is_capped():
    with pytest.raises(ValueError):
        taylor_coefficients(Iterated(inner=CAULIFLOWER, m=1), 17)


def test_blaschke_degree_two_taylor_oracle():
    # Frozen by-hand expansion of the shifted degree-2 Blaschke product:
    # c1 = 1, c2 = 0, c3 = -1/16 (double degeneracy at the boundary point).
    c = taylor_coefficients(BlaschkeFinite(d=2, evaluation_radius=1.5), 3)
    assert abs(c[0] - 1.0) < 1e-12
    assert abs(c[1]) < 1e-12
    assert abs(c[2] + 1.0 / 16.0) < 1e-10


def test_blaschke_infinite_taylor_oracle():
    # Frozen by-hand expansion of exp(2z/(z+2)) - 1: c2 = 0, c3 = -1/12.
    c = taylor_coefficients(BlaschkeInfinite(evaluation_radius=0.8), 3)
    assert abs(c[0] - 1.0) < 1e-12
    assert abs(c[1]) < 1e-12
    assert abs(c[2] + 1.0 / 12.0) < 1e-10


def test_germ_data_simple_and_degenerate():
    g = germ_data(CUBIC)
    assert g.degeneracy_p == 1
    assert g.a == pytest.approx(1.0)
    assert g.b == pytest.approx(1.0)
    assert g.gamma == pytest.approx(0.0)
    g2 = germ_data(BlaschkeFinite(d=2, evaluation_radius=1.5))
    assert g2.degeneracy_p == 2
    assert g2.gamma is None


def test_germ_data_rejects_non_tangent_maps():
    with pytest.raises(ValueError):
        germ_data(Polynomial(coefficients=(0.9, 1.0)))


@pytest.mark.parametrize(
    "coeffs,gamma",
    [
        ((1.0, 1.0), 1.0),
        ((1.0, 1.0, 1.0), 0.0),
        ((1.0, 0.5), 1.0),
        ((1.0, 0.25), 1.0),
        ((1.0, 1.0j), 1.0),
    ],
)
def test_iterative_residue_formula(coeffs, gamma):
    g = germ_data(Polynomial(coefficients=coeffs))
    assert g.gamma == pytest.approx(gamma, abs=1e-12)


@pytest.mark.parametrize("radius", [0.02, 0.05, 0.1])
def test_contour_residue_matches_formula(radius):
    for m in (CAULIFLOWER, CUBIC, Polynomial(coefficients=(1.0, 0.5, 0.125))):
        g = germ_data(m)
        contour = iterative_residue_contour(m, radius)
        assert abs(contour - g.gamma) < 1e-9


def test_contour_residue_rejects_tiny_sample_counts():
    with pytest.raises(ValueError):
        iterative_residue_contour(CAULIFLOWER, 0.05, samples=10)


@settings(max_examples=50, deadline=None)
@given(
    re=st.floats(-0.05, 0.05),
    im=st.floats(-0.05, 0.05),
)
def test_local_inverse_is_a_right_inverse(re, im):
    z = complex(re, im)
    w = CAULIFLOWER(z)
    back = local_inverse(CAULIFLOWER, w, z)
    assert abs(CAULIFLOWER(back) - w) < 1e-12
    assert abs(back - z) < 1e-10


def test_moebius_inverse_closed_form():
    m = Moebius(a=1.0, b=0.0, c=1.0, d=1.0, evaluation_radius=2.0)
    z = 0.2 - 0.1j
    assert m.inverse(m(z)) == pytest.approx(z)
    # z/(1+z) is itself parabolic at 0 with a = -1
    assert germ_data(m).a == pytest.approx(-1.0)


def test_normalize_germ_rotates_the_quadratic_coefficient():
    m = Polynomial(coefficients=(1.0, 1.0j))
    out, lam = normalize_germ(m)
    g = germ_data(out)
    assert abs(g.a.imag) < 1e-10
    assert g.a.real == pytest.approx(1.0)
    assert lam == pytest.approx(-1.0j)
    # already-normalized germs pass through unchanged
    same, lam1 = normalize_germ(CAULIFLOWER)
    assert same is CAULIFLOWER and lam1 == 1.0


def test_conjugated_composed_iterated_consistency():
    lam = Polynomial(coefficients=(2.0,))
    conj = Conjugated(inner=CAULIFLOWER, change=lam)
    z = 0.04 + 0.02j
    assert conj(z) == pytest.approx(2.0 * CAULIFLOWER(z / 2.0))
    it2 = Iterated(inner=CAULIFLOWER, m=2)
    assert it2(z) == pytest.approx(CAULIFLOWER(CAULIFLOWER(z)))
    h = 1e-7
    fd = (it2(z + h) - it2(z - h)) / (2 * h)
    assert abs(it2.deriv(z) - fd) < 1e-6


def test_catalog_roundtrip_and_simple_ids():
    cat = load_catalog()
    simple = set(cat.simple_parabolic_ids())
    assert {"cauliflower", "cubic", "half", "quarter", "iquad"} <= simple
    assert "blaschke2" not in simple and "blaschke-inf" not in simple
    for name in simple:
        assert germ_data(cat.map(name)).degeneracy_p == 1
    pair = cat.pair("ab-blaschke-lambda2")
    assert pair["source_id"] == "half" and pair["target_id"] == "quarter"
    with pytest.raises(KeyError):
        cat.map("no-such-map")


def test_map_from_json_variants():
    doc = {
        "variant": "conjugated",
        "inner": {"variant": "polynomial", "coefficients": [[1, 0], [1, 0]]},
        "change": {"variant": "polynomial", "coefficients": [[0, 1]]},
    }
    m = map_from_json(doc)
    z = 0.03 - 0.01j
    assert m(z) == pytest.approx(1j * CAULIFLOWER(z / 1j))
    with pytest.raises(ValueError):
        map_from_json({"variant": "nope"})
