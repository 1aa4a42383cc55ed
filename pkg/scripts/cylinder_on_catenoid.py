#!/usr/bin/env python3
"""Roll a cylinder on a catenoid: the developable-on-minimal experiment.

A ball can never roll with direction-independent center speed from a
non-umbilic point of a minimal surface (the isotropy radius 1/h blows up).
For a general rolling surface the right notion of speed is the length of the
angular velocity vector, and the rolling surface is re-positioned for each
direction so that the contact direction v is a fixed principal direction of
the roller. With a cylinder contacting along its flat (axial) direction, the
matching principal curvature is 0 = h, so the rolling should be isotropic:
|omega(0)| is the same for every direction. This script measures exactly
that, and contrasts it with the direction-dependent center speed of a ball.

Usage: python scripts/cylinder_on_catenoid.py [rho]
"""

import math
import sys

import numpy as np

from rollkin.curves import geodesic_from
from rollkin.experiments import speed_squared
from rollkin.geometry import SurfaceChart, catenoid, evaluate_point_geometry
from rollkin.rolling import ChartTarget, anti_develop, build_motion, rolling_grid


def tangent_cylinder(p, v, N_p, rho):
    """Cylinder of radius rho tangent at p with normal N_p, axis along v.

    u is the tube angle (0 at the contact line), w the axial coordinate.
    """
    axis_point = p + rho * N_p
    a = v / np.linalg.norm(v)
    b = np.cross(N_p, a)

    def pt(u, w):
        return axis_point + w * a + rho * (-N_p * math.cos(u) + b * math.sin(u))

    def jet(u, w):
        cu, su = math.cos(u), math.sin(u)
        r = axis_point + w * a + rho * (-N_p * cu + b * su)
        ru = rho * (N_p * su + b * cu)
        rw = a
        ruu = rho * (N_p * cu - b * su)
        z = np.zeros(3)
        return r, ru, rw, ruu, z, z

    chart = SurfaceChart("tangent-cylinder", {"rho": rho}, ((-3.0, 3.0), (-3.0, 3.0)), pt, jet)
    pg = evaluate_point_geometry(chart, 0.0, 0.0)
    if np.dot(pg.normal, N_p) < 0:
        chart = chart.with_orientation(True)
    return chart


def main():
    rho = float(sys.argv[1]) if len(sys.argv) > 1 else 0.5
    chart = catenoid(1.0)
    u0, v0 = 0.6, 0.4
    pg = evaluate_point_geometry(chart, u0, v0)
    print(f"catenoid point (u, v) = ({u0}, {v0}): "
          f"kappa1 = {pg.kappa1:.6f}, kappa2 = {pg.kappa2:.6f}, h = {pg.mean_curvature:.2e}")

    arc = 1e-2
    ts = rolling_grid(arc)
    thetas = [k * math.pi / 8 for k in range(8)]
    omega_speeds = []
    ball_speeds = []
    for theta in thetas:
        curve = geodesic_from(chart, u0, v0, theta, arc, steps=256)
        p = curve.point(0.0)
        vel = curve.velocity(0.0)
        vel /= np.linalg.norm(vel)
        N_p = curve.normal(0.0)

        roller = tangent_cylinder(p, vel, N_p, rho)
        rg = evaluate_point_geometry(roller, 0.0, 0.0)
        # start the contact curve on the roller along v (its flat direction)
        theta_tilde = math.atan2(float(vel @ rg.e2), float(vel @ rg.e1))
        target = ChartTarget(roller, 0.0, 0.0, theta=theta_tilde)
        ad = anti_develop(target, lambda t: curve.darboux(t).kappa_g, p, vel, N_p, ts)
        fam = build_motion(curve, ad)
        omega_speeds.append(float(np.linalg.norm(fam.omegas[0])))
        ball_speeds.append(math.sqrt(speed_squared(pg, theta, rho)))

    print(f"\ncylinder rho = {rho} contacting along its flat direction:")
    print(f"{'theta':>8}  {'|omega(0)| (cylinder)':>22}  {'ball speed (r = rho)':>21}")
    for theta, w, s in zip(thetas, omega_speeds, ball_speeds):
        print(f"{theta:8.4f}  {w:22.12f}  {s:21.12f}")
    spread_cyl = max(omega_speeds) - min(omega_speeds)
    spread_ball = max(ball_speeds) - min(ball_speeds)
    print(f"\nspread over directions: cylinder {spread_cyl:.3e}  (isotropic)")
    print(f"                        ball     {spread_ball:.3e}  (anisotropic)")
    print(f"expected |omega(0)| = kappa1 = {pg.kappa1:.12f}")


if __name__ == "__main__":
    main()
