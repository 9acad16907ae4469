import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotcyl import (
    GeneratingParams,
    InvariantViolation,
    NoSignChange,
    IntegrationError,
    circle_curve,
    curve_scalars,
    integrate_arc,
    q_profile,
    rotation_field,
    shoot_closed_curve,
    tangent_components,
)
from rotcyl.curves import PlanarCurve, find_closed_curves, shoelace_area, shooting_residual


# -- GeneratingParams ------------------------------------------------------

@pytest.mark.parametrize("a,b,k,n", [(0, 0, 1, 1), (0, -1, 1, 1), (1, 0, 0, 1), (1, 0, 1, 0),
                                     (math.nan, 1, 1, 1), (1, math.inf, 1, 1)])
def test_params_rejected(a, b, k, n):
    with pytest.raises(ValueError):
        GeneratingParams(a, b, k, n)


# -- circle_curve ----------------------------------------------------------

@pytest.mark.parametrize("r,a,b", [(1, 0, 1), (1, 1, 0), (2, 0.25, -0.5)])
def test_circle_forced_offset(r, a, b):
    assert circle_curve(r, a, 256).params.b == pytest.approx(b, abs=1e-15)


def test_unit_circle_scalars():
    sc = curve_scalars(circle_curve(1, 0, 256))
    assert sc.length == pytest.approx(2 * math.pi, abs=1e-14)
    assert sc.area == pytest.approx(math.pi, abs=1e-6)
    assert sc.total_sq_curvature == pytest.approx(2 * math.pi, abs=1e-12)
    assert sc.moment == pytest.approx(2 * math.pi, abs=1e-12)


def test_circle_total_sq_curvature_with_rotation():
    assert curve_scalars(circle_curve(1, 1, 256)).total_sq_curvature == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("r,n", [(0, 64), (-1, 64), (1, 8)])
def test_circle_bad_input(r, n):
    with pytest.raises(ValueError):
        circle_curve(r, 0.0, n)


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.2, 5.0), a=st.floats(-2.0, 2.0), n=st.sampled_from([16, 64, 256, 1000]))
def test_circle_invariants_hold(r, a, n):
    c = circle_curve(r, a, n).validate()
    res = c.residuals()
    assert res["closure"] == 0.0
    assert res["curvature_law"] < 1e-12 * max(1.0, abs(a) * r * r, 1 / r)
    assert res["turning"] < 1e-10
    sc = curve_scalars(c)
    assert sc.length ** 2 >= 4 * math.pi * sc.area * (1 - 1e-12)


# -- q_profile / rotation_field / tangent_components -----------------------

@pytest.mark.parametrize("a,expected", [(1.0, 3.0), (0.0, 1.0), (0.1, 1.2)])
def test_q_on_unit_circle(a, expected):
    c = circle_curve(1, a, 256)
    # direct formula sample by sample: kappa^2 + 2a (x1 x2' - x2 x1')
    x, th = c.points, c.theta
    direct = c.kappa ** 2 + 2 * a * (x[:, 0] * np.sin(th) - x[:, 1] * np.cos(th))
    np.testing.assert_allclose(q_profile(c), direct, atol=1e-14)
    np.testing.assert_allclose(q_profile(c), expected, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(r=st.floats(0.3, 4.0), a=st.floats(-1.0, 1.0))
def test_q_circle_formula(r, a):
    c = circle_curve(r, a, 128)
    np.testing.assert_allclose(q_profile(c), 1 / r ** 2 + 2 * a * r, rtol=1e-12, atol=1e-12)


def test_rotation_field_vanishes_on_centred_circle():
    assert np.max(np.abs(rotation_field(circle_curve(1.7, 0.4, 256)))) < 1e-14


def test_rotation_field_on_translated_circle():
    c = circle_curve(1.0, 0.0, 256)
    shift = np.array([0.3, -0.2])
    moved = PlanarCurve(c.params, c.length, c.points + shift, c.theta, c.kappa)
    psi = rotation_field(moved)
    # <alpha + c, alpha'> = <c, alpha'> = -0.3 sin s - 0.2 cos s
    np.testing.assert_allclose(psi, -0.3 * np.sin(c.s) - 0.2 * np.cos(c.s), atol=1e-14)


def test_tangent_on_unit_circle():
    c = circle_curve(1.0, 0.0, 256)
    g1, g2 = tangent_components(c)
    np.testing.assert_allclose(g1, -np.sin(c.s), atol=1e-14)
    np.testing.assert_allclose(g2, np.cos(c.s), atol=1e-14)


def test_tangent_identities_on_solved_curve(peanut):
    g1, g2 = tangent_components(peanut)
    assert np.max(np.abs(g1 ** 2 + g2 ** 2 - 1)) < 1e-12
    assert abs(peanut.h * g1.sum()) < 1e-8
    assert abs(peanut.h * g2.sum()) < 1e-8


# -- integrate_arc ---------------------------------------------------------

@pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, 0.0)])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_unit_circle_arc(a, b, k):
    arc = integrate_arc(GeneratingParams(a, b, k), 1.0)
    assert np.max(np.abs(np.hypot(arc.points[:, 0], arc.points[:, 1]) - 1)) < 1e-12
    assert arc.event_s == pytest.approx(math.pi / k, abs=1e-12)
    np.testing.assert_allclose(arc.event_point, [math.cos(math.pi / k), math.sin(math.pi / k)],
                               atol=1e-12)


def test_off_circle_start_moves_radially():
    arc = integrate_arc(GeneratingParams(1.0, 0.0, 1), 1.1)
    r = np.hypot(arc.points[:, 0], arc.points[:, 1])
    assert np.ptp(r) > 1e-2


def test_integrate_arc_errors():
    with pytest.raises(ValueError):
        integrate_arc(GeneratingParams(1.0, 0.0), 0.0)
    with pytest.raises(IntegrationError):
        integrate_arc(GeneratingParams(1.0, 0.0), 1.0, max_arclength=0.5)
    with pytest.raises(IntegrationError):
        integrate_arc(GeneratingParams(1.0, 0.0, 1), 2.0, r_bound=1.5)


# -- shoot_closed_curve ----------------------------------------------------

@pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, 0.0)])
def test_shoot_recovers_unit_circle(a, b):
    c = shoot_closed_curve(GeneratingParams(a, b, 1), (0.5, 2.0))
    assert c.closure_residual < 1e-8
    assert np.max(np.abs(np.sqrt(c.radius_sq) - 1)) < 1e-6


@pytest.mark.parametrize("r", [0.6, 1.0, 1.9])
def test_shoot_zero_rotation_gives_radius_over_b(r):
    c = shoot_closed_curve(GeneratingParams(0.0, 1 / r, 1), (0.5, 2.0))
    assert np.max(np.abs(np.sqrt(c.radius_sq) - r)) < 1e-6


def test_shoot_no_sign_change():
    # both ends start off the circle on the same side of the residual's zero
    with pytest.raises(NoSignChange):
        shoot_closed_curve(GeneratingParams(1.0, -0.5, 2), (0.7, 0.9))


def test_scan_for_a1_bm02_k2_finds_only_the_circle():
    curves, _ = find_closed_curves(GeneratingParams(1.0, -0.2, 2), 0.2, 3.0)
    assert len(curves) >= 1
    for c in curves:
        assert c.residuals()["curvature_law"] < 1e-6
    assert all(c.is_circle(1e-7) for c in curves)


def test_scan_for_a1_bm05_k2_finds_noncircular(config):
    curves, _ = find_closed_curves(GeneratingParams(1.0, -0.5, 2), 0.2, 3.0)
    assert any(not c.is_circle() for c in curves)
    assert any(c.is_circle(1e-7) for c in curves)


def test_solved_curve_invariants(peanut, four_finger, config):
    for c in (peanut, four_finger):
        c.validate(config)
        res = c.residuals()
        assert res["closure"] <= 1e-8
        assert res["curvature_law"] <= 1e-6
        assert res["turning"] <= 1e-6
        assert c.is_embedded()
        assert not c.is_circle()
        assert abs(shooting_residual(c.params, c.r0, config)) <= config.shoot_tol


def test_solved_curve_symmetry(four_finger):
    # four-fold: rotating by a quarter of the length maps samples to samples rotated by pi/2
    n = four_finger.n_samples
    pts = four_finger.points
    rot = pts @ np.array([[0, -1], [1, 0]]).T
    np.testing.assert_allclose(np.roll(pts, -n // 4, axis=0), rot, atol=1e-9)


def test_shoot_is_deterministic():
    p = GeneratingParams(1.0, -2.0, 4)
    c1 = shoot_closed_curve(p, (0.55, 0.7), n_samples=512)
    c2 = shoot_closed_curve(p, (0.55, 0.7), n_samples=512)
    assert np.array_equal(c1.points, c2.points)
    assert np.array_equal(c1.kappa, c2.kappa)


# -- curve_scalars ---------------------------------------------------------

def test_moment_is_twice_area_and_shoelace_converges(config):
    p = GeneratingParams(1.0, -0.5, 2)
    errs = []
    for n in (256, 512, 1024):
        c = shoot_closed_curve(p, (0.55, 0.65), config, n)
        sc = curve_scalars(c)
        assert abs(sc.moment - 2 * sc.area) < 1e-6
        assert sc.length ** 2 >= 4 * math.pi * sc.area
        errs.append(abs(shoelace_area(c.points) - sc.area))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.8)


def test_clockwise_curve_is_an_error():
    c = circle_curve(1.0, 0.0, 64)
    flipped = PlanarCurve(c.params, c.length, c.points * [1, -1], -c.theta, c.kappa)
    with pytest.raises(InvariantViolation) as exc:
        curve_scalars(flipped)
    assert exc.value.name == "orientation"
    with pytest.raises(InvariantViolation) as exc:
        flipped.validate()
    assert exc.value.name == "orientation"


def test_law_violation_named():
    c = circle_curve(1.0, 1.0, 64)
    bad = PlanarCurve(c.params, c.length, c.points, c.theta, c.kappa + 1e-3)
    with pytest.raises(InvariantViolation) as exc:
        bad.validate()
    assert exc.value.name in ("curvature_law", "turning")
