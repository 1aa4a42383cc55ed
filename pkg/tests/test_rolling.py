"""Rolling module: anti-development, existence, motion family, classification."""

import math

import numpy as np
import pytest

from rollkin.curves import curve_from_parameter_path, geodesic_from
from rollkin.errors import NoCenter, NotRolling, StepFailure
from rollkin.geometry import cylinder, evaluate_point_geometry, plane, sphere
from rollkin.numutil import hat, rotation_about_axis
from rollkin.rolling import (
    BallTarget,
    ChartTarget,
    PlaneTarget,
    Rotation,
    Standstill,
    Translation,
    angular_velocity_components,
    anti_develop,
    build_motion,
    center_trajectory,
    classify_instantaneous,
    roll_ball,
    rolling_exists,
    rolling_grid,
)

from conftest import random_interior_point


def _zero_kg(t):
    return 0.0


# --- anti-development ---------------------------------------------------------------

def test_zero_curvature_develops_to_great_circle():
    p = np.array([0.0, 0.0, 0.0])
    v = np.array([1.0, 0.0, 0.0])
    N = np.array([0.0, 0.0, 1.0])
    r = 0.5
    ts = np.linspace(0.0, 1.0, 201)
    ad = anti_develop(BallTarget(r), _zero_kg, p, v, N, ts)
    center = p + r * N
    for k, t in enumerate(ts):
        expected = center + r * (-N * math.cos(t / r) + v * math.sin(t / r))
        assert np.linalg.norm(ad.gamma[k] - expected) < 1e-9


def test_zero_curvature_develops_to_straight_line():
    p = np.array([1.0, 2.0, 0.0])
    v = np.array([0.0, 1.0, 0.0])
    N = np.array([0.0, 0.0, 1.0])
    ts = np.linspace(0.0, 2.0, 101)
    ad = anti_develop(PlaneTarget(), _zero_kg, p, v, N, ts)
    for k, t in enumerate(ts):
        assert np.linalg.norm(ad.gamma[k] - (p + t * v)) < 1e-10


def test_latitude_circle_develops_to_plane_circle():
    # classical development: the latitude of colatitude v0 unrolls onto a
    # circle of curvature kappa_g = -cot(v0) (inward normal convention)
    chart = sphere(1.0)
    v0 = 1.0
    rho = math.sin(v0)
    # already unit speed: u advances at 1/rho
    lat = curve_from_parameter_path(
        chart, lambda t: (t / rho, v0), (0.0, 2 * math.pi * rho),
        duv=lambda t: (1.0 / rho, 0.0), dduv=lambda t: (0.0, 0.0),
    )
    assert lat.length == pytest.approx(2 * math.pi * rho, abs=1e-9)
    kg = lat.darboux(0.0).kappa_g
    assert kg == pytest.approx(-math.cos(v0) / math.sin(v0), abs=1e-10)

    p = lat.point(0.0)
    vel = lat.velocity(0.0)
    N = lat.normal(0.0)
    ts = np.linspace(0.0, lat.length, 256)
    ad = anti_develop(PlaneTarget(), lambda t: lat.darboux(t).kappa_g, p, vel, N, ts)
    side = np.cross(N, vel)
    for k, t in enumerate(ts):
        expected = p + (math.sin(kg * t) / kg) * vel + ((1 - math.cos(kg * t)) / kg) * side
        assert np.linalg.norm(ad.gamma[k] - expected) < 1e-6
    measured = ad.measured_triples()
    assert np.abs(measured[:, 0] - kg).max() < 1e-7


def test_anti_development_fidelity_on_ball(charts, rng):
    # measured geodesic curvature tracks the prescribed one
    chart = charts["ellipsoid"]
    u, v = random_interior_point(chart, rng)
    curve = geodesic_from(chart, u, v, 0.8, 0.05, steps=128)
    ts = rolling_grid(0.05)
    p, vel, N = curve.point(0.0), curve.velocity(0.0), curve.normal(0.0)
    ad = anti_develop(BallTarget(0.4), lambda t: curve.darboux(t).kappa_g, p, vel, N, ts)
    # initial conditions: same point, same tangent, same frame
    assert np.linalg.norm(ad.gamma[0] - p) < 1e-12
    D0 = np.column_stack([vel, np.cross(N, vel), N])
    assert np.abs(ad.frames[0] - D0).max() < 1e-12
    measured = ad.measured_triples()
    assert np.abs(measured[:, 0] - ad.triples[:, 0]).max() < 1e-7
    assert np.abs(measured[:, 1] - 1.0 / 0.4).max() < 1e-7
    assert np.abs(measured[:, 2]).max() < 1e-7


def test_anti_development_step_failure():
    p = np.array([0.0, 0.0, 0.0])
    v = np.array([1.0, 0.0, 0.0])
    N = np.array([0.0, 0.0, 1.0])
    ts = np.linspace(0.0, 0.5, 9)
    with pytest.raises(StepFailure):
        anti_develop(BallTarget(0.5), _zero_kg, p, v, N, ts, tol=0.0)


# --- existence ------------------------------------------------------------------------

def test_umbilic_obstruction_on_sphere():
    # ball of radius 1/h against the curvature sphere: data coincide at t = 0
    n = 33
    ts = np.linspace(0, 0.1, n)
    gamma_triples = np.column_stack([np.zeros(n), np.ones(n), np.zeros(n)])
    star_triples = np.column_stack([np.zeros(n), np.ones(n), np.zeros(n)])
    ok, t_bad = rolling_exists(gamma_triples, star_triples, ts)
    assert not ok
    assert t_bad == 0.0


def test_plane_always_rolls():
    n = 17
    ts = np.linspace(0, 1, n)
    gamma_triples = np.zeros((n, 3))
    star_triples = np.column_stack([np.zeros(n), np.full(n, 0.5), np.zeros(n)])
    ok, t_bad = rolling_exists(gamma_triples, star_triples, ts)
    assert ok and t_bad is None


def test_cylinder_helix_rolls_against_double_radius_ball():
    # kappa_n = 1/2 = ball's but tau_g = -1/2 != 0 protects existence
    chart = cylinder(1.0)
    curve = geodesic_from(chart, 0.0, 0.0, math.pi / 4, 0.05, steps=64)
    ts = rolling_grid(0.05)
    p, vel, N = curve.point(0.0), curve.velocity(0.0), curve.normal(0.0)
    ad = anti_develop(BallTarget(2.0), lambda t: curve.darboux(t).kappa_g, p, vel, N, ts)
    fam = build_motion(curve, ad)
    assert fam.no_spin_residual() < 1e-8


def test_refinement_catches_between_sample_violation():
    # margin dips to zero between samples: a synthetic near-crossing
    ts = np.linspace(0.0, 1.0, 21)

    def gamma_fn(t):
        return np.array([0.0, 1.0 + (t - 0.475) ** 2, 0.0])

    def star_fn(t):
        return np.array([0.0, 1.0, 0.0])

    gamma_triples = np.array([gamma_fn(t) for t in ts])
    star_triples = np.array([star_fn(t) for t in ts])
    ok_coarse, _ = rolling_exists(gamma_triples, star_triples, ts)
    assert ok_coarse  # samples alone miss the contact
    ok, t_bad = rolling_exists(gamma_triples, star_triples, ts, refine=(gamma_fn, star_fn))
    assert not ok
    assert t_bad == pytest.approx(0.475, abs=1e-6)


# --- motion family ---------------------------------------------------------------------

def test_family_starts_at_identity():
    _, fam = roll_ball(sphere(1.0), 0.3, 1.2, 0.7, 0.5, 0.01)
    assert np.abs(fam.rotations[0] - np.eye(3)).max() < 1e-12
    assert np.linalg.norm(fam.translations[0]) < 1e-12


def test_disk_rolling_closed_form():
    curve, fam = roll_ball(plane(), 0.0, 0.0, 0.3, 1.0, 0.5, geodesic_steps=128)
    v0 = curve.velocity(0.0)
    N0 = curve.normal(0.0)
    axis = np.cross(N0, v0)
    for k, t in enumerate(fam.ts):
        expected = rotation_about_axis(axis, t)
        assert np.abs(fam.rotations[k] - expected).max() < 1e-7


def test_motion_invariants_across_charts(charts, rng):
    cases = [
        ("sphere", 0.5), ("sphere", 0.25), ("cylinder", 2.0),
        ("ellipsoid", 0.4), ("torus", 0.3), ("unduloid", 1.0), ("plane", 1.0),
    ]
    for name, r in cases:
        chart = charts[name]
        u, v = random_interior_point(chart, rng)
        theta = float(rng.uniform(0, 2 * math.pi))
        _, fam = roll_ball(chart, u, v, theta, r, 0.01)
        assert fam.orthogonality_residual() < 1e-9, name
        assert fam.no_spin_residual() < 1e-8, name
        assert fam.no_skid_residual() < 1e-7, name
        assert fam.tangency_residual() < 1e-6, name
        assert fam.omega_fd_residual() < 1e-5, name


def test_omega_components_examples():
    from rollkin.curves import DarbouxTriple

    flat = DarbouxTriple(0.0, 0.0, 0.0, 0.0)
    assert np.allclose(angular_velocity_components(flat, flat), 0.0)
    # ball r on plane along a line
    ball = DarbouxTriple(0.0, 1.0 / 0.5, 0.0, 0.0)
    assert np.allclose(angular_velocity_components(flat, ball), [0.0, 2.0, 0.0])
    # ball r=2 on cylinder R=1 inward at theta = pi/4
    gamma = DarbouxTriple(0.0, 0.5, -0.5, 0.0)
    star = DarbouxTriple(0.0, 0.5, 0.0, 0.0)
    assert np.allclose(angular_velocity_components(gamma, star), [-0.5, 0.0, 0.0])


def test_angular_velocity_matches_formula_along_roll():
    chart = cylinder(1.0)
    _, fam = roll_ball(chart, 0.2, 0.1, math.pi / 4, 2.0, 0.01)
    assert np.allclose(fam.omegas[0], fam.frames[0] @ np.array([-0.5, 0.0, 0.0]), atol=1e-9)


def test_group_property_restart(charts):
    # restarting the construction mid-curve reproduces the one-shot family
    chart = charts["ellipsoid"]
    r = 0.4
    length = 0.02
    curve = geodesic_from(chart, 0.4, 1.1, 0.9, length, steps=256)
    ts = rolling_grid(length, steps=40)
    p, vel, N = curve.point(0.0), curve.velocity(0.0), curve.normal(0.0)

    def kg(t):
        return curve.darboux(t).kappa_g

    ad = anti_develop(BallTarget(r), kg, p, vel, N, ts)
    fam = build_motion(curve, ad)

    mid = 20
    s = float(ts[mid])
    ts2 = ts[mid:]
    p2, vel2, N2 = curve.point(s), curve.velocity(s), curve.normal(s)
    vel2 = vel2 / np.linalg.norm(vel2)
    ad2 = anti_develop(BallTarget(r), kg, p2, vel2, N2, ts2)
    frames2 = np.array([curve.frame(t) for t in ts2])
    contacts2 = np.array([curve.point(t) for t in ts2])
    A2 = np.einsum("nij,nkj->nik", frames2, ad2.frames)
    b2 = contacts2 - np.einsum("nij,nj->ni", A2, ad2.gamma)

    A_s, b_s = fam.rotations[mid], fam.translations[mid]
    for k in range(len(ts2)):
        A_comp = A2[k] @ A_s
        b_comp = A2[k] @ b_s + b2[k]
        assert np.abs(A_comp - fam.rotations[mid + k]).max() < 1e-6
        assert np.linalg.norm(b_comp - fam.translations[mid + k]) < 1e-6


def test_not_rolling_raises_for_curvature_ball():
    with pytest.raises(NotRolling) as err:
        roll_ball(sphere(1.0), 0.3, 1.2, 0.5, 1.0, 0.01)
    assert err.value.t == 0.0


def test_family_export_schemas():
    _, fam = roll_ball(plane(), 0.0, 0.0, 0.0, 1.0, 0.01)
    lines = fam.to_csv().strip().split("\n")
    header = lines[0].split(",")
    assert header[0] == "t"
    assert len(header) == 1 + 9 + 3 + 3 + 3
    assert len(lines) == len(fam.ts) + 1
    import json

    payload = json.loads(fam.to_json())
    assert set(payload) == {"t", "A", "b", "omega", "contact"}
    assert len(payload["A"][0]) == 9


# --- instantaneous classification --------------------------------------------------------

def test_classify_standstill_translation_rotation():
    assert isinstance(classify_instantaneous(np.zeros((3, 3)), np.zeros(3)), Standstill)
    trans = classify_instantaneous(np.zeros((3, 3)), np.array([1.0, 0.0, 0.0]))
    assert isinstance(trans, Translation)
    assert np.allclose(trans.velocity, [1.0, 0.0, 0.0])

    omega = np.array([0.0, 0.0, 1.0])
    x0 = np.array([1.0, 0.0, 0.0])
    Q = hat(omega)
    v = -Q @ x0
    rot = classify_instantaneous(Q, v, contact=x0)
    assert isinstance(rot, Rotation)
    assert np.allclose(rot.center, x0, atol=1e-12)
    assert np.allclose(rot.omega, omega)


def test_classify_screw_raises_no_center():
    omega = np.array([0.0, 0.0, 2.0])
    with pytest.raises(NoCenter):
        classify_instantaneous(hat(omega), np.array([0.0, 0.0, 1.0]))


def test_classify_rejects_non_skew():
    with pytest.raises(ValueError):
        classify_instantaneous(np.eye(3), np.zeros(3))


def test_rolling_instantaneous_is_rotation_about_contact():
    _, fam = roll_ball(sphere(1.0), 0.4, 1.0, 0.3, 0.5, 0.01)
    Q, v = fam.instantaneous(5)
    motion = classify_instantaneous(Q, v, contact=fam.contacts[5])
    assert isinstance(motion, Rotation)
    assert np.linalg.norm(motion.center - fam.contacts[5]) < 1e-9
    assert np.linalg.norm(motion.omega - fam.omegas[5]) < 1e-12


# --- center trajectory ----------------------------------------------------------------------

def test_center_starts_at_offset_point():
    _, fam = roll_ball(sphere(1.0), 0.3, 1.2, 0.7, 0.5, 0.01)
    pts, resid = center_trajectory(fam, 0.5)
    expected = fam.contacts[0] + 0.5 * fam.normals[0]
    assert np.linalg.norm(pts[0] - expected) < 1e-12
    assert resid < 1e-9


def test_center_on_plane_stays_at_height_r():
    _, fam = roll_ball(plane(), 0.0, 0.0, 0.2, 1.0, 0.5, geodesic_steps=128)
    pts, _ = center_trajectory(fam, 1.0)
    assert np.abs(pts[:, 2] - 1.0).max() < 1e-9
    # straight line: direction constant
    d = pts[-1] - pts[0]
    mids = pts[len(pts) // 2] - pts[0]
    assert np.linalg.norm(np.cross(d, mids)) < 1e-9


def test_center_inside_sphere_keeps_distance():
    # ball r=0.5 rolling inside the unit sphere: center stays 0.5 from origin
    _, fam = roll_ball(sphere(1.0), 0.3, 1.2, 1.1, 0.5, 0.01)
    pts, _ = center_trajectory(fam, 0.5)
    dist = np.linalg.norm(pts, axis=1)
    assert np.abs(dist - 0.5).max() < 1e-9


# --- general chart target ---------------------------------------------------------------------

def _log_chart(rho):
    """Horizontal cylinder of radius rho resting tangent on z = 0 at the origin.

    Axis along y at height rho; u is the tube angle (u = 0 at the contact
    line), v the axial coordinate. The natural normal points toward the axis.
    """
    from rollkin.geometry import SurfaceChart

    def pt(u, v):
        return np.array([rho * math.sin(u), v, rho * (1.0 - math.cos(u))])

    def jet(u, v):
        r = pt(u, v)
        ru = np.array([rho * math.cos(u), 0.0, rho * math.sin(u)])
        rv = np.array([0.0, 1.0, 0.0])
        ruu = np.array([-rho * math.sin(u), 0.0, rho * math.cos(u)])
        z = np.zeros(3)
        return r, ru, rv, ruu, z, z

    return SurfaceChart("log", {"rho": rho}, ((-2.0, 2.0), (-2.0, 2.0)), pt, jet)


def test_chart_target_cylinder_rolls_on_plane():
    # a chart-defined cylinder rolling like a log: contact along its curved
    # direction, so the anti-development is the circle around the tube
    base = plane()
    curve = geodesic_from(base, 0.0, 0.0, 0.0, 0.02, steps=64)
    p, vel, N = curve.point(0.0), curve.velocity(0.0), curve.normal(0.0)

    log = _log_chart(0.5)
    pg = evaluate_point_geometry(log, 0.0, 0.0)
    assert np.allclose(pg.position, p)
    assert np.allclose(pg.normal, N)
    assert pg.kappa1 == pytest.approx(2.0, abs=1e-12)  # e1 = curved direction

    ts = rolling_grid(0.02, steps=32)
    target = ChartTarget(log, 0.0, 0.0, theta=0.0)
    ad = anti_develop(target, lambda t: curve.darboux(t).kappa_g, p, vel, N, ts)
    assert np.abs(ad.triples[:, 1] - 2.0).max() < 1e-7
    assert np.abs(ad.triples[:, 2]).max() < 1e-8
    fam = build_motion(curve, ad)
    assert np.abs(fam.rotations[0] - np.eye(3)).max() < 1e-8
    assert fam.no_spin_residual() < 1e-8
    assert fam.no_skid_residual() < 1e-7
    assert fam.tangency_residual() < 1e-6
