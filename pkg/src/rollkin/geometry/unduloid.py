"""Unduloid chart: the Delaunay surface of revolution with constant mean curvature.

The profile is the solution of

    rho' = cos(psi),   z' = sin(psi),   psi' = 2H - sin(psi) / rho

in the meridian half-plane, with s arclength and psi the tangent angle.
The quantity rho*sin(psi) - H*rho^2 is a first integral, so the
constant-mean-curvature residual of the integrated profile is a direct
accuracy check. Starting at a neck (rho = neck, psi = pi/2) with
0 < neck < 1/(2H) gives the unduloid; the profile radius then oscillates
between neck and 1/H - neck and never degenerates.
"""

import math
import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ..numutil import rk4_step
from .charts import SurfaceChart


def _profile_rhs(H):
    def rhs(_, y):
        rho, _z, psi = y
        return np.array([math.cos(psi), math.sin(psi), 2.0 * H - math.sin(psi) / rho])

    return rhs


def integrate_profile(H, neck, length, steps_per_unit=2048):
    """Integrate the profile ODE symmetrically on [-length/2, length/2].

    Returns (s, rho, z, psi) sampled on a uniform grid, with s = 0 at a neck.
    """
    if H <= 0:
        raise ValueError("unduloid mean curvature H must be positive")
    if not 0.0 < neck < 0.5 / H:
        raise ValueError("neck radius must lie in (0, 1/(2H))")
    half = 0.5 * length
    n = max(64, int(math.ceil(half * steps_per_unit)))
    hs = half / n
    rhs = _profile_rhs(H)
    y0 = np.array([neck, 0.0, 0.5 * math.pi])

    def sweep(sign):
        ys = [y0]
        t = 0.0
        for _ in range(n):
            ys.append(rk4_step(rhs, t, ys[-1], sign * hs))
            t += sign * hs
        return ys

    fwd = sweep(+1.0)
    bwd = sweep(-1.0)
    ys = np.array(bwd[::-1] + fwd[1:])
    s = np.linspace(-half, half, 2 * n + 1)
    return s, ys[:, 0], ys[:, 1], ys[:, 2]


def unduloid(H=1.0, neck=0.3, length=4.0, steps_per_unit=2048):
    """Unduloid with mean curvature H (w.r.t. the reported normal) and neck radius ``neck``.

    u is the azimuth, v the arclength along the profile. The profile is stored
    as cubic Hermite interpolants; chart derivatives come from the profile ODE
    evaluated on the interpolated state, so they are consistent with the map
    to interpolation accuracy.
    """
    s, rho, z, psi = integrate_profile(H, neck, length, steps_per_unit)
    rho_i = CubicHermiteSpline(s, rho, np.cos(psi))
    z_i = CubicHermiteSpline(s, z, np.sin(psi))
    psi_i = CubicHermiteSpline(s, psi, 2.0 * H - np.sin(psi) / rho)

    def pt(u, v):
        w = float(rho_i(v))
        return np.array([w * math.cos(u), w * math.sin(u), float(z_i(v))])

    def jet(u, v):
        cu, su = math.cos(u), math.sin(u)
        w = float(rho_i(v))
        ps = float(psi_i(v))
        cps, sps = math.cos(ps), math.sin(ps)
        dpsi = 2.0 * H - sps / w
        r = np.array([w * cu, w * su, float(z_i(v))])
        ru = np.array([-w * su, w * cu, 0.0])
        rv = np.array([cps * cu, cps * su, sps])
        ruu = np.array([-w * cu, -w * su, 0.0])
        ruv = np.array([-cps * su, cps * cu, 0.0])
        rvv = np.array([-sps * dpsi * cu, -sps * dpsi * su, cps * dpsi])
        return r, ru, rv, ruu, ruv, rvv

    margin = 0.02 * length
    dom = ((-2 * math.pi, 2 * math.pi), (s[0] + margin, s[-1] - margin))
    chart = SurfaceChart(
        "unduloid",
        {"H": H, "neck": neck, "length": length},
        dom,
        pt,
        jet,
        # r_u x r_v points opposite to the normal the profile ODE assumes
        orientation_flip=True,
    )
    return chart


def profile_cmc_residual(H, neck, length=4.0, steps_per_unit=2048):
    """Max deviation of the first integral rho*sin(psi) - H*rho^2 along the profile."""
    _, rho, _, psi = integrate_profile(H, neck, length, steps_per_unit)
    force = rho * np.sin(psi) - H * rho**2
    return float(np.max(np.abs(force - force[0])))
