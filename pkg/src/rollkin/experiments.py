"""Speed-of-the-rolling-ball experiments: isotropy, CMC radius, classification.

The closed-form initial speed squared of the ball B_r rolling from a point
with principal curvatures kappa1 >= kappa2, in the direction at angle theta
from e1, is

    1 + r^2 kappa2^2 - 2 r kappa2
      + r (kappa2 - kappa1) (2 - r (kappa1 + kappa2)) cos^2(theta),

equivalently (1 - r kappa_n)^2 + r^2 tau_g^2 through Euler's formulas. The
speed is direction-independent exactly when the cos^2 coefficient vanishes:
the point is umbilic or r = 1/h. Simulated speeds finite-difference the
center trajectory of a short rolled arc and must agree with the closed form
to integration accuracy.
"""

import math
from dataclasses import dataclass

import numpy as np

from .curves import euler_curvatures
from .errors import BadDirections
from .export import speed_rows_csv
from .geometry.pointgeom import evaluate_point_geometry
from .numutil import one_sided_derivative
from .rolling import center_trajectory, roll_ball

TOL_ISO_CLOSED = 1e-8   # Theorem-exact closed form
TOL_ISO_SIMULATED = 1e-4  # carries ODE truncation error
DEFAULT_ARC = 1e-2


def speed_squared(pg, theta, r):
    """Closed-form initial speed squared (expanded cos^2 form)."""
    k1, k2 = pg.kappa1, pg.kappa2
    c = math.cos(theta)
    return 1.0 + r * r * k2 * k2 - 2.0 * r * k2 + r * (k2 - k1) * (2.0 - r * (k1 + k2)) * c * c


def speed_squared_from_darboux(kappa_n, tau_g, r):
    """Speed squared from the Darboux data: (1 - r kappa_n)^2 + r^2 tau_g^2."""
    return (1.0 - r * kappa_n) ** 2 + (r * tau_g) ** 2


def speed_coefficient(pg, r):
    """Coefficient of cos^2(theta) in the speed-squared profile."""
    k1, k2 = pg.kappa1, pg.kappa2
    return r * (k2 - k1) * (2.0 - r * (k1 + k2))


def cmc_radius(pg, eps=1e-9):
    """The ball parameter r = 1/h that can roll isotropically from this point.

    None at (near-)minimal points: when kappa1 + kappa2 vanishes no finite r
    makes the cos^2 coefficient vanish at a non-umbilic point.
    """
    trace = pg.kappa1 + pg.kappa2
    if abs(trace) < eps * max(1.0, abs(pg.kappa1), abs(pg.kappa2)):
        return None
    return 2.0 / trace


def initial_speed_simulated(chart, u, v, theta, r, arc=DEFAULT_ARC, steps=None):
    """|c'(0)| from rolling B_r along a short geodesic arc.

    The center trajectory is differenced at t = 0 with the one-sided
    fourth-order stencil over the first five samples. NotRolling propagates,
    in particular from umbilic points with r = 1/h.
    """
    geodesic_steps = max(64, int(math.ceil(arc * 8192)))
    _, family = roll_ball(
        chart, u, v, theta, r, arc, steps=steps, geodesic_steps=geodesic_steps
    )
    points, _ = center_trajectory(family, r)
    return float(np.linalg.norm(one_sided_derivative(points[:5], family.dt)))


def _distinct_directions(thetas, tol=1e-9):
    classes = []
    for th in thetas:
        reduced = math.fmod(th, math.pi)
        if reduced < 0:
            reduced += math.pi
        if not any(
            abs(reduced - c) < tol or abs(abs(reduced - c) - math.pi) < tol for c in classes
        ):
            classes.append(reduced)
    return len(classes)


@dataclass(frozen=True)
class IsotropyReport:
    """Per-direction initial speeds at a point and the isotropy verdict."""

    u: float
    v: float
    r: float
    thetas: tuple
    speeds_closed: tuple
    speeds_simulated: tuple | None
    spread_closed: float
    spread_simulated: float | None
    verdict: str            # "Isotropic" | "Anisotropic" (closed form)
    verdict_simulated: str | None
    relation: str           # "umbilic" | "r_equals_1_over_h" | "neither"
    coefficient_fit: float
    coefficient_closed: float

    @property
    def isotropic(self):
        return self.verdict == "Isotropic"


def isotropy_test(
    chart, u, v, r, thetas, simulate=False, arc=DEFAULT_ARC,
    tol_iso=TOL_ISO_CLOSED, tol_sim=TOL_ISO_SIMULATED,
):
    """Isotropy of the initial speed over the given directions.

    Needs at least three pairwise nonparallel angles (mod pi), otherwise the
    affine-in-cos^2 profile is undetermined and BadDirections is raised.
    """
    thetas = [float(t) for t in thetas]
    if _distinct_directions(thetas) < 3:
        raise BadDirections("need at least 3 pairwise nonparallel directions (mod pi)")
    pg = evaluate_point_geometry(chart, u, v)
    sq = np.array([speed_squared(pg, th, r) for th in thetas])
    speeds = np.sqrt(np.maximum(sq, 0.0))
    spread = float(speeds.max() - speeds.min())
    verdict = "Isotropic" if spread < tol_iso else "Anisotropic"

    design = np.column_stack([np.ones(len(thetas)), np.cos(thetas) ** 2])
    coef, *_ = np.linalg.lstsq(design, sq, rcond=None)
    coefficient_fit = float(coef[1])

    trace = pg.kappa1 + pg.kappa2
    if pg.is_umbilic:
        relation = "umbilic"
    elif abs(2.0 - r * trace) < tol_iso * max(1.0, abs(r) * (abs(pg.kappa1) + abs(pg.kappa2))):
        relation = "r_equals_1_over_h"
    else:
        relation = "neither"

    speeds_sim = None
    spread_sim = None
    verdict_sim = None
    if simulate:
        speeds_sim = tuple(
            initial_speed_simulated(chart, u, v, th, r, arc=arc) for th in thetas
        )
        spread_sim = float(max(speeds_sim) - min(speeds_sim))
        verdict_sim = "Isotropic" if spread_sim < tol_sim else "Anisotropic"

    return IsotropyReport(
        u=float(u), v=float(v), r=float(r), thetas=tuple(thetas),
        speeds_closed=tuple(float(s) for s in speeds),
        speeds_simulated=speeds_sim,
        spread_closed=spread, spread_simulated=spread_sim,
        verdict=verdict, verdict_simulated=verdict_sim,
        relation=relation,
        coefficient_fit=coefficient_fit,
        coefficient_closed=float(speed_coefficient(pg, r)),
    )


@dataclass(frozen=True)
class SpeedClassification:
    """Constant-speed classification of a sampled chart region."""

    verdict: str  # "Plane" | "Sphere" | "Cylinder" | "NotConstant"
    radius: float | None
    speed_spread: float
    kappa1_range: tuple
    kappa2_range: tuple
    r_matches_isotropy: bool | None

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "radius": self.radius,
            "speed_spread": self.speed_spread,
            "kappa1_range": list(self.kappa1_range),
            "kappa2_range": list(self.kappa2_range),
            "r_matches_isotropy": self.r_matches_isotropy,
        }


def classify_constant_speed(chart, r, region=None, grid=(12, 12), n_thetas=8, tol=TOL_ISO_CLOSED):
    """Classify a region by whether the closed-form ball speed is constant on it.

    Constant speed over points and directions forces constant principal
    curvatures, hence a plane, sphere, or circular cylinder (with the
    isotropy radius r = 2/(kappa1 + kappa2) for the cylinder).
    """
    if region is None:
        region = chart.domain_inset()
    (u0, u1), (v0, v1) = region
    us = np.linspace(u0, u1, grid[0])
    vs = np.linspace(v0, v1, grid[1])
    thetas = np.linspace(0.0, math.pi, n_thetas, endpoint=False)
    speeds = []
    k1s, k2s = [], []
    for uu in us:
        for vv in vs:
            pg = evaluate_point_geometry(chart, uu, vv)
            k1s.append(pg.kappa1)
            k2s.append(pg.kappa2)
            for th in thetas:
                speeds.append(math.sqrt(max(speed_squared(pg, th, r), 0.0)))
    speeds = np.array(speeds)
    k1s, k2s = np.array(k1s), np.array(k2s)
    spread = float(speeds.max() - speeds.min())
    k1_rng = (float(k1s.min()), float(k1s.max()))
    k2_rng = (float(k2s.min()), float(k2s.max()))

    if spread >= tol:
        return SpeedClassification("NotConstant", None, spread, k1_rng, k2_rng, None)

    kscale = max(1.0, float(np.max(np.abs(k1s))), float(np.max(np.abs(k2s))))
    ctol = 1e-8 * kscale
    flat1 = float(np.max(np.abs(k1s))) < ctol
    flat2 = float(np.max(np.abs(k2s))) < ctol
    const1 = (k1_rng[1] - k1_rng[0]) < ctol
    const2 = (k2_rng[1] - k2_rng[0]) < ctol
    if flat1 and flat2:
        return SpeedClassification("Plane", None, spread, k1_rng, k2_rng, None)
    if const1 and const2 and abs(k1s[0] - k2s[0]) < ctol:
        return SpeedClassification(
            "Sphere", 1.0 / abs(float(np.mean(k1s))), spread, k1_rng, k2_rng, None
        )
    if const1 and const2 and (flat1 or flat2):
        knz = float(np.mean(k2s)) if flat1 else float(np.mean(k1s))
        matches = abs(2.0 - r * (float(np.mean(k1s)) + float(np.mean(k2s)))) < tol * max(1.0, abs(r) * kscale)
        return SpeedClassification("Cylinder", 1.0 / abs(knz), spread, k1_rng, k2_rng, matches)
    return SpeedClassification("NotConstant", None, spread, k1_rng, k2_rng, None)


@dataclass(frozen=True)
class SpeedSample:
    """One (theta, r) cell of a speed landscape at a fixed point."""

    u: float
    v: float
    r: float
    theta: float
    speed_closed: float
    speed_simulated: float | None = None
    t: float = 0.0


def speed_landscape(chart, u, v, r_values, theta_values, simulate=False, arc=DEFAULT_ARC):
    """Dense closed-form speed evaluation over r x theta (optionally simulated)."""
    pg = evaluate_point_geometry(chart, u, v)
    samples = []
    for r in r_values:
        for th in theta_values:
            closed = math.sqrt(max(speed_squared(pg, th, r), 0.0))
            sim = None
            if simulate:
                sim = initial_speed_simulated(chart, u, v, th, r, arc=arc)
            samples.append(
                SpeedSample(u=float(u), v=float(v), r=float(r), theta=float(th),
                            speed_closed=closed, speed_simulated=sim)
            )
    return samples


def speed_samples_csv(samples):
    rows = [
        (s.u, s.v, s.r, s.theta, s.speed_closed,
         float("nan") if s.speed_simulated is None else s.speed_simulated)
        for s in samples
    ]
    return speed_rows_csv(rows)


def isotropy_csv(report):
    rows = []
    for i, th in enumerate(report.thetas):
        sim = float("nan") if report.speeds_simulated is None else report.speeds_simulated[i]
        rows.append((report.u, report.v, report.r, th, report.speeds_closed[i], sim))
    return speed_rows_csv(rows)


def sample_points(chart, n, rng, region=None, nonumbilic=False, max_tries=1000):
    """Seeded random parameter points, optionally rejecting umbilics."""
    if region is None:
        region = chart.domain_inset()
    (u0, u1), (v0, v1) = region
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not sample enough points")
        uu = float(rng.uniform(u0, u1))
        vv = float(rng.uniform(v0, v1))
        if nonumbilic and evaluate_point_geometry(chart, uu, vv).is_umbilic:
            continue
        out.append((uu, vv))
    return out


def euler_speed_check(pg, theta, r):
    """Speed squared via the Darboux route (Euler composed with the general formula)."""
    kn, tg = euler_curvatures(pg, theta)
    return speed_squared_from_darboux(kn, tg, r)
