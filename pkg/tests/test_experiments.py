"""Experiments module: speed formulas, isotropy, CMC radius, classification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rollkin.errors import BadDirections, NotRolling
from rollkin.experiments import (
    classify_constant_speed,
    cmc_radius,
    euler_speed_check,
    initial_speed_simulated,
    isotropy_csv,
    isotropy_test,
    sample_points,
    speed_coefficient,
    speed_landscape,
    speed_samples_csv,
    speed_squared,
    speed_squared_from_darboux,
)
from rollkin.geometry import evaluate_point_geometry, plane, sphere

from conftest import random_interior_point

THREE_DIRS = (0.0, math.pi / 3, 2 * math.pi / 3)


class _PG:
    """Bare principal-curvature carrier for closed-form checks."""

    def __init__(self, k1, k2):
        self.kappa1, self.kappa2 = max(k1, k2), min(k1, k2)
        self.is_umbilic = abs(k1 - k2) < 1e-12
        self.mean_curvature = 0.5 * (k1 + k2)


# --- closed-form speed ------------------------------------------------------------

def test_speed_squared_examples():
    assert speed_squared(_PG(0, 0), 1.23, 5.0) == 1.0                      # plane
    assert speed_squared(_PG(1, 1), 0.4, 0.5) == pytest.approx(0.25)       # sphere r=0.5
    assert speed_squared(_PG(1, 0), 2.2, 2.0) == pytest.approx(1.0)        # cylinder r=2R
    # cylinder r = 1: 0 along the curved direction, 1 along the axis
    assert speed_squared(_PG(1, 0), 0.0, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert speed_squared(_PG(1, 0), math.pi / 2, 1.0) == pytest.approx(1.0)


kappas = st.floats(-5.0, 5.0, allow_nan=False)
radii = st.floats(-3.0, 3.0, allow_nan=False)
angles = st.floats(0.0, 2 * math.pi, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(kappas, kappas, angles, radii)
def test_speed_formulas_agree(k1, k2, theta, r):
    pg = _PG(k1, k2)
    assert abs(speed_squared(pg, theta, r) - euler_speed_check(pg, theta, r)) < 1e-12 * max(
        1.0, (1 + abs(r) * max(abs(k1), abs(k2))) ** 2
    )


@settings(max_examples=200, deadline=None)
@given(kappas, kappas, angles, radii)
def test_speed_is_pi_periodic(k1, k2, theta, r):
    pg = _PG(k1, k2)
    a = speed_squared(pg, theta, r)
    b = speed_squared(pg, theta + math.pi, r)
    assert abs(a - b) < 1e-12 * max(1.0, abs(a))


def test_darboux_route_is_definitional():
    kn, tg, r = 0.7, -0.3, 1.9
    assert speed_squared_from_darboux(kn, tg, r) == (1 - r * kn) ** 2 + (r * tg) ** 2


# --- simulated speed ---------------------------------------------------------------

def test_simulated_speed_on_sphere():
    chart = sphere(1.0)
    for theta in (0.0, 1.1, 2.7):
        s = initial_speed_simulated(chart, 0.3, 1.2, theta, 0.5)
        assert abs(s - 0.5) < 1e-5


def test_simulated_speed_on_plane():
    s = initial_speed_simulated(plane(), 0.2, -0.4, 0.9, 1.0)
    assert abs(s - 1.0) < 1e-6


def test_simulated_speed_curvature_ball_fails():
    with pytest.raises(NotRolling):
        initial_speed_simulated(sphere(1.0), 0.3, 1.2, 0.5, 1.0)


def test_closed_form_matches_simulation_random(charts, rng):
    names = ("sphere", "cylinder", "ellipsoid", "torus", "unduloid")
    for k in range(50):
        chart = charts[names[k % len(names)]]
        u, v = random_interior_point(chart, rng)
        theta = float(rng.uniform(0, 2 * math.pi))
        pg = evaluate_point_geometry(chart, u, v)
        kmax = max(abs(pg.kappa1), abs(pg.kappa2))
        r = float(rng.uniform(0.2, 0.8)) / (kmax + 1.0)  # safely admissible
        if rng.uniform() < 0.5:
            r = -r
        closed = math.sqrt(speed_squared(pg, theta, r))
        simulated = initial_speed_simulated(chart, u, v, theta, r)
        assert abs(simulated - closed) < 1e-4


# --- isotropy ------------------------------------------------------------------------

def test_isotropy_on_unduloid_cmc_radius(charts, rng):
    chart = charts["unduloid"]
    for u, v in sample_points(chart, 5, rng, nonumbilic=True):
        rep = isotropy_test(chart, u, v, 1.0, THREE_DIRS)
        assert rep.verdict == "Isotropic"
        assert rep.relation == "r_equals_1_over_h"
        for r in (0.8, 1.25):
            rep = isotropy_test(chart, u, v, r, THREE_DIRS)
            assert rep.verdict == "Anisotropic"
            assert rep.relation == "neither"
            assert rep.coefficient_fit == pytest.approx(rep.coefficient_closed, abs=1e-9)


def test_isotropy_on_ellipsoid_generic_point(charts):
    rep = isotropy_test(charts["ellipsoid"], 0.4, 1.1, 0.5, THREE_DIRS)
    assert rep.verdict == "Anisotropic"
    assert rep.relation == "neither"


def test_isotropy_on_sphere_is_umbilic(charts):
    rep = isotropy_test(charts["sphere"], 0.3, 0.8, 0.5, THREE_DIRS)
    assert rep.verdict == "Isotropic"
    assert rep.relation == "umbilic"


def test_isotropy_needs_three_directions(charts):
    with pytest.raises(BadDirections):
        isotropy_test(charts["sphere"], 0.3, 0.8, 0.5, [0.0, math.pi / 2])
    with pytest.raises(BadDirections):
        # theta and theta + pi are parallel
        isotropy_test(charts["sphere"], 0.3, 0.8, 0.5, [0.0, 1.0, 1.0 + math.pi])


def test_three_direction_sufficiency(charts, rng):
    # agreement at 3 nonparallel angles forces agreement everywhere
    chart = charts["unduloid"]
    u, v = sample_points(chart, 1, rng, nonumbilic=True)[0]
    pg = evaluate_point_geometry(chart, u, v)
    r = cmc_radius(pg)
    three = [math.sqrt(speed_squared(pg, th, r)) for th in THREE_DIRS]
    assert max(three) - min(three) < 1e-10
    many = [math.sqrt(speed_squared(pg, th, r)) for th in rng.uniform(0, 2 * math.pi, 64)]
    assert max(many) - min(many) < 1e-9


def test_isotropy_verdict_matches_predicate(charts, rng):
    # verdict == (umbilic or r = 1/h) over random points and radii
    for name in ("sphere", "cylinder", "ellipsoid", "torus", "unduloid", "catenoid"):
        chart = charts[name]
        for _ in range(10):
            u, v = random_interior_point(chart, rng)
            pg = evaluate_point_geometry(chart, u, v)
            if rng.uniform() < 0.3 and cmc_radius(pg) is not None:
                r = cmc_radius(pg)
            else:
                r = float(rng.uniform(-2.0, 2.0))
                if abs(r) < 1e-3:
                    continue
            rep = isotropy_test(chart, u, v, r, THREE_DIRS)
            predicate = pg.is_umbilic or abs(2.0 - r * (pg.kappa1 + pg.kappa2)) < 1e-8
            assert rep.isotropic == predicate


def test_simulated_isotropy_report(charts, rng):
    chart = charts["unduloid"]
    u, v = sample_points(chart, 1, rng, nonumbilic=True)[0]
    rep = isotropy_test(chart, u, v, 1.0, THREE_DIRS, simulate=True)
    assert rep.verdict_simulated == "Isotropic"
    assert rep.spread_simulated < 1e-4
    assert len(rep.speeds_simulated) == 3


# --- cmc radius -----------------------------------------------------------------------

def test_cmc_radius_examples(charts):
    assert cmc_radius(evaluate_point_geometry(charts["cylinder"], 0.2, 0.3)) == pytest.approx(2.0)
    assert cmc_radius(evaluate_point_geometry(charts["sphere"], 0.4, 1.0)) == pytest.approx(1.0)
    assert cmc_radius(evaluate_point_geometry(charts["catenoid"], 0.5, 0.8)) is None


# --- classification ---------------------------------------------------------------------

def test_classify_cylinder(charts):
    result = classify_constant_speed(charts["cylinder"], 2.0)
    assert result.verdict == "Cylinder"
    assert result.radius == pytest.approx(1.0, abs=1e-12)
    assert result.r_matches_isotropy
    assert classify_constant_speed(charts["cylinder"], 1.9).verdict == "NotConstant"


def test_classify_plane_sphere_torus(charts):
    assert classify_constant_speed(charts["plane"], 1.0).verdict == "Plane"
    sphere_result = classify_constant_speed(charts["sphere"], 0.7)
    assert sphere_result.verdict == "Sphere"
    assert sphere_result.radius == pytest.approx(1.0, abs=1e-9)
    assert classify_constant_speed(charts["torus"], 0.5).verdict == "NotConstant"


def test_classify_outward_cylinder():
    from rollkin.geometry import cylinder

    outward = cylinder(1.0, orientation="outward")
    result = classify_constant_speed(outward, -2.0)
    assert result.verdict == "Cylinder"
    assert result.radius == pytest.approx(1.0, abs=1e-12)
    assert result.r_matches_isotropy


# --- landscape ----------------------------------------------------------------------------

def test_landscape_structure(charts):
    chart = charts["ellipsoid"]
    u, v = 0.4, 1.1
    pg = evaluate_point_geometry(chart, u, v)
    thetas = np.linspace(0, math.pi, 9)
    rs = [0.5, cmc_radius(pg), 2.0]
    samples = speed_landscape(chart, u, v, rs, thetas)
    assert len(samples) == len(rs) * len(thetas)
    by_r = {}
    for s in samples:
        by_r.setdefault(s.r, []).append(s)
    for r, group in by_r.items():
        sq = np.array([g.speed_closed**2 for g in group])
        cos2 = np.cos([g.theta for g in group]) ** 2
        coef = np.polyfit(cos2, sq, 1)[0]
        # affine in cos^2 with the closed-form coefficient
        assert coef == pytest.approx(speed_coefficient(pg, r), abs=1e-9)
    # theta-variation changes sign as r crosses 1/h
    assert speed_coefficient(pg, 0.5) * speed_coefficient(pg, 2.0) < 0
    assert abs(speed_coefficient(pg, cmc_radius(pg))) < 1e-12


def test_landscape_constant_on_sphere(charts):
    samples = speed_landscape(charts["sphere"], 0.3, 0.9, [0.25, 0.5, 2.0], np.linspace(0, 2 * math.pi, 7))
    for s in samples:
        assert s.speed_closed == pytest.approx(abs(1 - s.r), abs=1e-12)


# --- csv schemas ------------------------------------------------------------------------------

def test_speed_csv_headers(charts):
    rep = isotropy_test(charts["sphere"], 0.3, 0.8, 0.5, THREE_DIRS)
    text = isotropy_csv(rep)
    assert text.startswith("u,v,r,theta,speed_closed,speed_simulated\n")
    assert len(text.strip().split("\n")) == 4
    samples = speed_landscape(charts["sphere"], 0.3, 0.9, [0.5], [0.0, 1.0, 2.0])
    text = speed_samples_csv(samples)
    assert text.startswith("u,v,r,theta,speed_closed,speed_simulated\n")


def test_minimal_point_anisotropic_for_all_r(charts):
    chart = charts["catenoid"]
    pg = evaluate_point_geometry(chart, 0.7, 0.5)
    assert abs(pg.mean_curvature) < 1e-12
    for r in np.geomspace(0.05, 20.0, 10):
        for sign in (1.0, -1.0):
            rep = isotropy_test(chart, 0.7, 0.5, sign * r, THREE_DIRS)
            assert rep.verdict == "Anisotropic"
