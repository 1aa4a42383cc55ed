"""Curves on surface charts: Darboux frames, Euler's curvature formulas, geodesics.

All Darboux quantities follow the conventions

    kappa_g = <gamma'', N x gamma'>,  kappa_n = <gamma'', N>,
    tau_g   = -<N', N x gamma'>,

for unit-speed curves, with N the chart's oriented unit normal.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import DomainExit, SingularCurve, StepFailure
from .export import format_float
from .geometry.pointgeom import (
    evaluate_point_geometry,
    normal_derivatives,
    tangent_coordinates,
)
from .numutil import cross3, rk4_step, solve2

EPS_SPEED = 1e-10


@dataclass(frozen=True)
class DarbouxTriple:
    """The three Darboux curvatures of a unit-speed surface curve at parameter t."""

    kappa_g: float
    kappa_n: float
    tau_g: float
    t: float

    def as_array(self):
        return np.array([self.kappa_g, self.kappa_n, self.tau_g])


class CallablePath:
    """Parameter path t -> (u(t), v(t)) from callables.

    Missing derivatives fall back to central differences with step
    1e-5 times the parameter span.
    """

    def __init__(self, uv, span, duv=None, dduv=None):
        self._uv = uv
        self._duv = duv
        self._dduv = dduv
        self.span = (float(span[0]), float(span[1]))
        self._h = 1e-5 * (self.span[1] - self.span[0])

    def uv(self, t):
        u, v = self._uv(t)
        return float(u), float(v)

    def duv(self, t):
        if self._duv is not None:
            du, dv = self._duv(t)
            return float(du), float(dv)
        h = self._h
        up, vp = self._uv(t + h)
        um, vm = self._uv(t - h)
        return (up - um) / (2 * h), (vp - vm) / (2 * h)

    def dduv(self, t):
        if self._dduv is not None:
            ddu, ddv = self._dduv(t)
            return float(ddu), float(ddv)
        h = self._h
        up, vp = self._uv(t + h)
        u0, v0 = self._uv(t)
        um, vm = self._uv(t - h)
        return (up - 2 * u0 + um) / (h * h), (vp - 2 * v0 + vm) / (h * h)


class HermitePath:
    """Dense-output path from integration samples.

    Values and first derivatives are cubic Hermite interpolants; second
    derivatives come from the supplied acceleration callback (the ODE
    right-hand side), so they stay consistent with the dynamics.
    """

    def __init__(self, ts, uvs, duvs, accel=None):
        ts = np.asarray(ts, dtype=float)
        uvs = np.asarray(uvs, dtype=float)
        duvs = np.asarray(duvs, dtype=float)
        self.span = (float(ts[0]), float(ts[-1]))
        self._pos = CubicHermiteSpline(ts, uvs, duvs)
        if accel is not None:
            dduvs = np.array([accel(t, uv, duv) for t, uv, duv in zip(ts, uvs, duvs)])
            self._vel = CubicHermiteSpline(ts, duvs, dduvs)
        else:
            self._vel = self._pos.derivative()
        self._accel = accel

    def uv(self, t):
        u, v = self._pos(t)
        return float(u), float(v)

    def duv(self, t):
        du, dv = self._vel(t)
        return float(du), float(dv)

    def dduv(self, t):
        if self._accel is not None:
            uv = np.array(self.uv(t))
            duv = np.array(self.duv(t))
            ddu, ddv = self._accel(t, uv, duv)
            return float(ddu), float(ddv)
        ddu, ddv = self._vel.derivative()(t)
        return float(ddu), float(ddv)


@dataclass(frozen=True)
class SurfaceCurve:
    """A parametrized curve lying on a chart (image of a parameter path)."""

    chart: object
    path: object
    length: float
    unit_speed: bool = False

    def uv(self, t):
        return self.path.uv(t)

    def point(self, t):
        u, v = self.path.uv(t)
        return self.chart.point(u, v)

    def velocity(self, t):
        u, v = self.path.uv(t)
        du, dv = self.path.duv(t)
        _, ru, rv, *_ = self.chart.jet(u, v)
        return du * ru + dv * rv

    def acceleration(self, t):
        u, v = self.path.uv(t)
        du, dv = self.path.duv(t)
        ddu, ddv = self.path.dduv(t)
        _, ru, rv, ruu, ruv, rvv = self.chart.jet(u, v)
        return (
            du * du * ruu + 2 * du * dv * ruv + dv * dv * rvv + ddu * ru + ddv * rv
        )

    def normal(self, t):
        u, v = self.path.uv(t)
        N, _, _ = normal_derivatives(self.chart, u, v)
        return N

    def normal_velocity(self, t):
        u, v = self.path.uv(t)
        du, dv = self.path.duv(t)
        _, Nu, Nv = normal_derivatives(self.chart, u, v)
        return du * Nu + dv * Nv

    def darboux(self, t):
        """Darboux curvature triple; assumes the curve is unit-speed."""
        u, v = self.path.uv(t)
        du, dv = self.path.duv(t)
        ddu, ddv = self.path.dduv(t)
        jet = self.chart.jet(u, v)
        _, ru, rv, ruu, ruv, rvv = jet
        vel = du * ru + dv * rv
        acc = du * du * ruu + 2 * du * dv * ruv + dv * dv * rvv + ddu * ru + ddv * rv
        N, Nu, Nv = normal_derivatives(self.chart, u, v, jet=jet)
        Ndot = du * Nu + dv * Nv
        side = cross3(N, vel)
        return DarbouxTriple(
            kappa_g=float(acc @ side),
            kappa_n=float(acc @ N),
            tau_g=float(-(Ndot @ side)),
            t=float(t),
        )

    def frame(self, t):
        """Darboux frame matrix with columns (gamma', N x gamma', N)."""
        vel = self.velocity(t)
        T = vel / np.linalg.norm(vel)
        N = self.normal(t)
        return np.column_stack([T, cross3(N, T), N])

    def point_geometry(self, t):
        u, v = self.path.uv(t)
        return evaluate_point_geometry(self.chart, u, v)


def darboux_data(curve, t):
    """Darboux triple of a unit-speed surface curve at parameter t."""
    return curve.darboux(t)


def euler_curvatures(pg, theta):
    """Normal curvature and geodesic torsion of the direction at angle theta from e1.

    kappa_n = kappa1 cos^2 + kappa2 sin^2; tau_g = (kappa2 - kappa1) sin cos.
    """
    c, s = math.cos(theta), math.sin(theta)
    kn = pg.kappa1 * c * c + pg.kappa2 * s * s
    tg = (pg.kappa2 - pg.kappa1) * s * c
    return kn, tg


def darboux_frame_ode_matrix(triple):
    """Lambda(t): the skew matrix with D' = D Lambda^T."""
    kg, kn, tg = triple.kappa_g, triple.kappa_n, triple.tau_g
    return np.array([[0.0, kg, kn], [-kg, 0.0, tg], [-kn, -tg, 0.0]])


# --- curve construction -------------------------------------------------------


def _chart_curve_rhs(chart, kappa_g=None):
    """RHS of the chart-coordinate ODE for a curve with prescribed geodesic curvature.

    kappa_g None means geodesic. The tangential part of the ambient
    acceleration is forced to kappa_g * (N x gamma').
    """

    def accel(t, uv, duv):
        u, v = uv
        du, dv = duv
        _, ru, rv, ruu, ruv, rvv = chart.jet(u, v)
        S = du * du * ruu + 2 * du * dv * ruv + dv * dv * rvv
        x, y = -(S @ ru), -(S @ rv)
        if kappa_g is not None:
            kg = kappa_g(t)
            if kg != 0.0:
                n = cross3(ru, rv)
                N = n / np.linalg.norm(n)
                if chart.orientation_flip:
                    N = -N
                side = cross3(N, du * ru + dv * rv)
                x += kg * (side @ ru)
                y += kg * (side @ rv)
        return np.array(solve2(ru @ ru, ru @ rv, rv @ rv, x, y))

    return accel


def integrate_chart_curve(chart, u0, v0, du0, dv0, length, steps, kappa_g=None, t0=0.0):
    """Fixed-step RK4 of the prescribed-geodesic-curvature ODE in chart coordinates.

    Returns (ts, uvs, duvs, accel). Raises DomainExit when the path leaves
    the chart domain before reaching ``length``.
    """
    accel = _chart_curve_rhs(chart, kappa_g)

    def rhs(t, y):
        a = accel(t, y[:2], y[2:])
        return np.array([y[2], y[3], a[0], a[1]])

    n = int(steps)
    h = length / n
    ts = t0 + np.linspace(0.0, length, n + 1)
    ys = np.empty((n + 1, 4))
    ys[0] = (u0, v0, du0, dv0)
    for i in range(n):
        y = rk4_step(rhs, ts[i], ys[i], h)
        if not chart.contains(y[0], y[1]):
            raise DomainExit(ts[i + 1], y[0], y[1])
        ys[i + 1] = y

    def accel_path(t, uv, duv):
        return accel(t, uv, duv)

    return ts, ys[:, :2], ys[:, 2:], accel_path


def geodesic_from(chart, u0, v0, theta, length, steps=None, kg_tol=1e-7):
    """Unit-speed geodesic from (u0, v0) in the direction at angle theta from e1.

    The step count doubles until the geodesic-curvature residual sampled
    along the output is below ``kg_tol``.
    """
    pg = evaluate_point_geometry(chart, u0, v0)
    w = math.cos(theta) * pg.e1 + math.sin(theta) * pg.e2
    jet = chart.jet(u0, v0)
    du0, dv0 = tangent_coordinates(jet, w)
    n = int(steps) if steps else 2048
    for _ in range(4):
        ts, uvs, duvs, accel = integrate_chart_curve(chart, u0, v0, du0, dv0, length, n)
        path = HermitePath(ts, uvs, duvs, accel)
        curve = SurfaceCurve(chart, path, length=length, unit_speed=True)
        check = np.linspace(0.0, length, 33)
        resid = max(abs(curve.darboux(t).kappa_g) for t in check)
        if resid < kg_tol:
            return curve
        n *= 2
    raise StepFailure(f"geodesic kappa_g residual {resid:.3e} after refinement")


def curve_from_parameter_path(chart, uv, span, duv=None, dduv=None):
    """Wrap a user parameter path and reparametrize it to unit speed."""
    path = CallablePath(uv, span, duv, dduv)
    raw = SurfaceCurve(chart, path, length=span[1] - span[0], unit_speed=False)
    return unit_speed_reparametrize(raw)


# --- unit-speed reparametrization ----------------------------------------------


class _ArcLengthTable:
    """Cumulative arclength on knots, adaptive quadrature in between."""

    def __init__(self, speed, span, knots=256):
        self.speed = speed
        self.ts = np.linspace(span[0], span[1], knots + 1)
        increments = [
            quad(speed, a, b, limit=100)[0] for a, b in zip(self.ts[:-1], self.ts[1:])
        ]
        self.cum = np.concatenate([[0.0], np.cumsum(increments)])

    @property
    def total(self):
        return float(self.cum[-1])

    def value(self, t):
        i = int(np.clip(np.searchsorted(self.ts, t) - 1, 0, len(self.ts) - 2))
        return float(self.cum[i] + quad(self.speed, self.ts[i], t, limit=100)[0])

    def invert(self, s):
        s = float(np.clip(s, 0.0, self.total))
        i = int(np.clip(np.searchsorted(self.cum, s) - 1, 0, len(self.ts) - 2))
        a, b = self.ts[i], self.ts[i + 1]
        if s <= self.cum[i]:
            return float(a)
        if s >= self.cum[i + 1]:
            return float(b)
        return float(brentq(lambda t: self.value(t) - s, a, b, xtol=1e-14))


class ReparametrizedPath:
    """Composition of a base curve's path with arclength inversion."""

    def __init__(self, base_curve, table):
        self.base = base_curve
        self.table = table
        self.span = (0.0, table.total)
        self._cache = {}

    def _t(self, s):
        t = self._cache.get(s)
        if t is None:
            t = self.table.invert(s)
            if len(self._cache) < 65536:
                self._cache[s] = t
        return t

    def uv(self, s):
        return self.base.path.uv(self._t(s))

    def duv(self, s):
        t = self._t(s)
        du, dv = self.base.path.duv(t)
        sigma = np.linalg.norm(self.base.velocity(t))
        return du / sigma, dv / sigma

    def dduv(self, s):
        t = self._t(s)
        du, dv = self.base.path.duv(t)
        ddu, ddv = self.base.path.dduv(t)
        vel = self.base.velocity(t)
        acc = self.base.acceleration(t)
        sigma = float(np.linalg.norm(vel))
        dsigma = float(vel @ acc) / sigma
        inv2 = 1.0 / (sigma * sigma)
        corr = dsigma / (sigma**3)
        return ddu * inv2 - du * corr, ddv * inv2 - dv * corr


def unit_speed_reparametrize(curve, samples=256):
    """Arclength reparametrization; curves already at unit speed pass through.

    Raises SingularCurve when the measured speed drops below the regularity
    threshold anywhere on the parameter span.
    """
    span = curve.path.span
    ts = np.linspace(span[0], span[1], samples + 1)
    speeds = np.array([np.linalg.norm(curve.velocity(t)) for t in ts])
    scale = max(1.0, float(speeds.max()))
    if speeds.min() < EPS_SPEED * scale:
        t_bad = float(ts[int(np.argmin(speeds))])
        raise SingularCurve(f"|gamma'| = {speeds.min():.3e} near t = {t_bad}")
    if np.max(np.abs(speeds - 1.0)) < 1e-10:
        return SurfaceCurve(curve.chart, curve.path, length=span[1] - span[0], unit_speed=True)
    table = _ArcLengthTable(lambda t: float(np.linalg.norm(curve.velocity(t))), span)
    path = ReparametrizedPath(curve, table)
    return SurfaceCurve(curve.chart, path, length=table.total, unit_speed=True)


def curve_to_csv(curve, ts):
    """CSV rows t,u,v,x,y,z,kappa_g,kappa_n,tau_g at the given parameters."""
    lines = ["t,u,v,x,y,z,kappa_g,kappa_n,tau_g"]
    for t in ts:
        u, v = curve.uv(t)
        x, y, z = curve.point(t)
        tri = curve.darboux(t)
        vals = [t, u, v, x, y, z, tri.kappa_g, tri.kappa_n, tri.tau_g]
        lines.append(",".join(format_float(val) for val in vals))
    return "\n".join(lines) + "\n"
