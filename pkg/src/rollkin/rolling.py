"""Rolling without skidding or spinning: anti-development and the motion family.

The moving surface is carried by the one-parameter family of direct
isometries f_t(x) = A_t x + b_t with

    A_t = D_t * Dtilde_t^T,    b_t = gamma(t) - A_t * gammatilde(t),

where D_t and Dtilde_t are the Darboux frame matrices of the contact curve
gamma and of its anti-development gammatilde (the unique curve on the moving
surface with the same geodesic curvature). The rolling exists iff the normal
curvature and geodesic torsion of the two curves are never simultaneously
equal; the angular velocity then has Darboux components
(tau_g - tau_g*, kappa_n* - kappa_n, 0).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .curves import HermitePath, SurfaceCurve, geodesic_from, integrate_chart_curve
from .errors import NoCenter, NotRolling, StepFailure
from .export import motion_family_csv, motion_family_json
from .numutil import cross3, rk4_step, sampled_derivative, vee

TOL_ANTIDEV = 1e-7
STEPS_PER_UNIT = 2048
MIN_STEPS = 24


# --- rolling-surface designations ----------------------------------------------


@dataclass(frozen=True)
class BallTarget:
    """Ball of radius |r| whose center starts at p + r N_p."""

    r: float


@dataclass(frozen=True)
class PlaneTarget:
    """The tangent plane at the starting contact point (classical development)."""


@dataclass(frozen=True)
class ChartTarget:
    """A general chart-defined rolling surface.

    The anti-development starts at (u0, v0) in the direction at angle
    ``theta`` from the chart's principal direction e1 there. When the chart
    is tangent-aligned with the fixed surface (same point, normal, and
    initial tangent) the construction yields f_0 = id; otherwise f_0 is the
    rigid motion bringing the chart into tangency.
    """

    chart: object
    u0: float
    v0: float
    theta: float = 0.0


@dataclass
class AntiDevelopment:
    """Sampled anti-development: contact locus on the moving surface.

    ``triples`` holds (kappa_g, kappa_n, tau_g) as used by the construction:
    for a ball these are (kappa_g(t), 1/r, 0) exactly; for a plane
    (kappa_g(t), 0, 0); for a general chart they are read from the chart's
    second fundamental form along the integrated curve.
    ``surface_normals`` are recomputed from the surface geometry (not from
    the integrated frames), so tangency checks against them are meaningful.
    """

    target: object
    ts: np.ndarray
    gamma: np.ndarray        # (n, 3)
    frames: np.ndarray       # (n, 3, 3)
    triples: np.ndarray      # (n, 3)
    surface_normals: np.ndarray
    curve: SurfaceCurve | None = None
    triple_fn: object = None  # callable t -> (kappa_g, kappa_n, tau_g)

    def measured_triples(self):
        """Darboux data measured from the integrated samples by finite differences.

        Independent of the nominal values fed to the frame ODE; used to bound
        integration drift (|kappa_g measured - kappa_g prescribed| etc.).
        """
        dt = float(self.ts[1] - self.ts[0])
        T = self.frames[:, :, 0]
        N = self.surface_normals
        dT = sampled_derivative(T, dt)
        dN = sampled_derivative(N, dt)
        side = np.cross(N, T)
        kg = np.einsum("ij,ij->i", dT, side)
        kn = np.einsum("ij,ij->i", dT, N)
        tg = -np.einsum("ij,ij->i", dN, side)
        return np.column_stack([kg, kn, tg])


def _lambda_matrix(kg, kn, tg):
    return np.array([[0.0, kg, kn], [-kg, 0.0, tg], [-kn, -tg, 0.0]])


def _integrate_frame_ode(kappa_g, kn_const, p, v, N_p, ts, substeps, project):
    """Ambient frame ODE D' = D Lambda^T with gamma' = D e1, plus drift projection."""
    n = len(ts) - 1

    def rhs(t, y):
        D = y[3:].reshape(3, 3)
        lam_T = _lambda_matrix(kappa_g(t), kn_const, 0.0).T
        dD = D @ lam_T
        return np.concatenate([D[:, 0], dD.reshape(-1)])

    D0 = np.column_stack([v, cross3(N_p, v), N_p])
    y = np.concatenate([p, D0.reshape(-1)])
    gam = np.empty((n + 1, 3))
    frames = np.empty((n + 1, 3, 3))
    gam[0], frames[0] = p, D0
    for i in range(n):
        h = (ts[i + 1] - ts[i]) / substeps
        t = ts[i]
        for _ in range(substeps):
            y = rk4_step(rhs, t, y, h)
            t += h
            g, D = project(y[:3], y[3:].reshape(3, 3))
            y = np.concatenate([g, D.reshape(-1)])
        gam[i + 1] = y[:3]
        frames[i + 1] = y[3:].reshape(3, 3)
    return gam, frames


def _project_factory(target, p, N_p):
    if isinstance(target, BallTarget):
        r = target.r
        center = p + r * N_p

        def project(g, D):
            g = center + abs(r) * (g - center) / np.linalg.norm(g - center)
            Nt = (center - g) / r
            T = D[:, 0] - (D[:, 0] @ Nt) * Nt
            T /= np.linalg.norm(T)
            return g, np.column_stack([T, cross3(Nt, T), Nt])

        def surface_normal(g):
            return (center - g) / r

        return project, surface_normal

    def project(g, D):
        g = g - ((g - p) @ N_p) * N_p
        T = D[:, 0] - (D[:, 0] @ N_p) * N_p
        T /= np.linalg.norm(T)
        return g, np.column_stack([T, cross3(N_p, T), N_p])

    def surface_normal(_):
        return N_p

    return project, surface_normal


def anti_develop(target, kappa_g, p, v, N_p, ts, substeps=1, tol=TOL_ANTIDEV):
    """Anti-development of a curve with geodesic curvature ``kappa_g(t)``.

    ``ts`` is the output grid (uniform, starting at the curve parameter of
    the contact point p, where the tangent is v and the surface normal N_p).
    Integration accuracy is verified by step halving; the result carries the
    finer solution. Raises StepFailure when halving stalls above tolerance.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    N_p = np.asarray(N_p, dtype=float)
    ts = np.asarray(ts, dtype=float)

    if isinstance(target, ChartTarget):
        return _anti_develop_chart(target, kappa_g, ts)

    kn_const = (1.0 / target.r) if isinstance(target, BallTarget) else 0.0
    project, surface_normal = _project_factory(target, p, N_p)

    sub = max(1, int(substeps))
    gam, frames = _integrate_frame_ode(kappa_g, kn_const, p, v, N_p, ts, sub, project)
    for _ in range(6):
        gam2, frames2 = _integrate_frame_ode(kappa_g, kn_const, p, v, N_p, ts, 2 * sub, project)
        diff = max(
            float(np.max(np.abs(gam2 - gam))), float(np.max(np.abs(frames2 - frames)))
        )
        if diff < tol:
            gam, frames = gam2, frames2
            break
        gam, frames = gam2, frames2
        sub *= 2
    else:
        raise StepFailure(f"anti-development step halving stalled at residual {diff:.3e}")
    if diff > 10.0 * tol:
        raise StepFailure(f"anti-development drift residual {diff:.3e} exceeds tolerance")

    triples = np.column_stack(
        [np.array([kappa_g(t) for t in ts]), np.full(len(ts), kn_const), np.zeros(len(ts))]
    )
    normals = np.array([surface_normal(g) for g in gam])

    def triple_fn(t):
        return np.array([kappa_g(t), kn_const, 0.0])

    return AntiDevelopment(
        target=target, ts=ts, gamma=gam, frames=frames, triples=triples,
        surface_normals=normals, triple_fn=triple_fn,
    )


def _anti_develop_chart(target, kappa_g, ts):
    from .geometry.pointgeom import evaluate_point_geometry, tangent_coordinates

    chart = target.chart
    pg = evaluate_point_geometry(chart, target.u0, target.v0)
    w = np.cos(target.theta) * pg.e1 + np.sin(target.theta) * pg.e2
    jet = chart.jet(target.u0, target.v0)
    du0, dv0 = tangent_coordinates(jet, w)
    length = float(ts[-1] - ts[0])
    steps = max(MIN_STEPS, 4 * (len(ts) - 1))
    grid, uvs, duvs, accel = integrate_chart_curve(
        chart, target.u0, target.v0, du0, dv0, length, steps, kappa_g=kappa_g, t0=ts[0]
    )
    path = HermitePath(grid, uvs, duvs, accel)
    curve = SurfaceCurve(chart, path, length=length, unit_speed=True)
    gam = np.array([curve.point(t) for t in ts])
    frames = np.array([curve.frame(t) for t in ts])
    trip = [curve.darboux(t) for t in ts]
    triples = np.array([[d.kappa_g, d.kappa_n, d.tau_g] for d in trip])
    normals = np.array([curve.normal(t) for t in ts])

    def triple_fn(t):
        d = curve.darboux(t)
        return np.array([d.kappa_g, d.kappa_n, d.tau_g])

    return AntiDevelopment(
        target=target, ts=ts, gamma=gam, frames=frames, triples=triples,
        surface_normals=normals, curve=curve, triple_fn=triple_fn,
    )


# --- existence (Theorem-style never-simultaneously-equal test) -------------------


def _margin(triple, triple_star):
    return max(abs(triple[1] - triple_star[1]), abs(triple[2] - triple_star[2]))


def rolling_exists(triples, triples_star, ts, refine=None, tol_scale=1e-9):
    """True iff (kappa_n, tau_g) never simultaneously match the starred data.

    Checked samplewise at tolerance 1e-9 times the curvature scale; when
    ``refine`` supplies the two Darboux callables, the margin is additionally
    minimized inside the bracketing intervals around sampled local minima
    that could plausibly dip to tolerance between samples, so near-crossings
    are not missed. Returns (exists, first_violation_t).
    """
    triples = np.asarray(triples, dtype=float)
    triples_star = np.asarray(triples_star, dtype=float)
    scale = max(1.0, float(np.max(np.abs(triples[:, 1:]))), float(np.max(np.abs(triples_star[:, 1:]))))
    tol = tol_scale * scale
    margins = np.maximum(
        np.abs(triples[:, 1] - triples_star[:, 1]), np.abs(triples[:, 2] - triples_star[:, 2])
    )
    bad = np.nonzero(margins < tol)[0]
    if bad.size:
        return False, float(ts[bad[0]])
    if refine is not None and len(ts) >= 3:
        f_gamma, f_star = refine

        def margin_at(t):
            return _margin(f_gamma(t), f_star(t))

        # a sampled local minimum can only hide a sub-tolerance dip if it is
        # within reach: its value minus the neighbor-to-neighbor variation
        steps = np.abs(np.diff(margins))
        interior = np.nonzero(
            (margins[1:-1] <= margins[:-2]) & (margins[1:-1] <= margins[2:])
        )[0] + 1
        for i in sorted(set(interior.tolist()) | {1, len(ts) - 2}):
            local_var = float(max(steps[max(i - 1, 0)], steps[min(i, len(steps) - 1)]))
            if margins[i] > 1e3 * tol + 4.0 * local_var:
                continue
            a, b = float(ts[i - 1]), float(ts[i + 1])
            res = minimize_scalar(margin_at, bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < tol:
                return False, float(res.x)
    return True, None


# --- the rigid-motion family -----------------------------------------------------


@dataclass
class RigidMotionFamily:
    """Sampled family f_t(x) = A_t x + b_t of a rolling, with diagnostics."""

    ts: np.ndarray
    rotations: np.ndarray     # (n, 3, 3)
    translations: np.ndarray  # (n, 3)
    omegas: np.ndarray        # (n, 3) ambient angular velocity
    contacts: np.ndarray      # (n, 3) gamma(t)
    normals: np.ndarray       # (n, 3) N(t) along gamma
    frames: np.ndarray        # (n, 3, 3) Darboux frames D_t of gamma
    anti: AntiDevelopment
    gamma_triples: np.ndarray  # (n, 3) Darboux data of gamma
    omega_components: np.ndarray = field(default=None)  # (n, 3) in the Darboux frame

    @property
    def dt(self):
        return float(self.ts[1] - self.ts[0])

    def orthogonality_residual(self):
        ATA = np.einsum("nji,njk->nik", self.rotations, self.rotations)
        return float(np.max(np.abs(ATA - np.eye(3))))

    def no_spin_residual(self):
        return float(np.max(np.abs(np.einsum("ij,ij->i", self.omegas, self.normals))))

    def no_skid_residual(self):
        """Max |A' gammatilde + b'| with A', b' finite-differenced from the samples."""
        dA = sampled_derivative(self.rotations, self.dt)
        db = sampled_derivative(self.translations, self.dt)
        res = np.einsum("nij,nj->ni", dA, self.anti.gamma) + db
        return float(np.max(np.linalg.norm(res, axis=1)))

    def tangency_residual(self):
        """Max |A_t Ntilde - N(t)| with Ntilde from the moving surface's geometry."""
        mapped = np.einsum("nij,nj->ni", self.rotations, self.anti.surface_normals)
        return float(np.max(np.linalg.norm(mapped - self.normals, axis=1)))

    def omega_fd_residual(self):
        """Max |vee(A' A^T) - omega| with A' finite-differenced from the samples."""
        dA = sampled_derivative(self.rotations, self.dt)
        Q = np.einsum("nij,nkj->nik", dA, self.rotations)
        Qs = 0.5 * (Q - np.transpose(Q, (0, 2, 1)))
        w = np.stack([Qs[:, 2, 1], Qs[:, 0, 2], Qs[:, 1, 0]], axis=1)
        return float(np.max(np.linalg.norm(w - self.omegas, axis=1)))

    def instantaneous(self, k):
        """(Q, v) of the instantaneous motion at sample k, from the Darboux data."""
        D = self.frames[k]
        lam = _lambda_matrix(*self.gamma_triples[k])
        lam_star = _lambda_matrix(*self.anti.triples[k])
        Q = D @ (lam_star - lam) @ D.T
        v = -Q @ self.contacts[k]
        return Q, v

    def to_csv(self):
        return motion_family_csv(self.ts, self.rotations, self.translations, self.omegas, self.contacts)

    def to_json(self):
        return motion_family_json(self.ts, self.rotations, self.translations, self.omegas, self.contacts)


def angular_velocity_components(triple, triple_star):
    """Darboux-frame components of the angular velocity: (tau_g - tau_g*, kappa_n* - kappa_n, 0)."""
    return np.array([triple.tau_g - triple_star.tau_g, triple_star.kappa_n - triple.kappa_n, 0.0])


def build_motion(curve, anti):
    """Assemble the rigid-motion family from a contact curve and its anti-development.

    Raises NotRolling when the existence condition fails on the grid.
    """
    ts = anti.ts
    n = len(ts)
    frames = np.empty((n, 3, 3))
    contacts = np.empty((n, 3))
    normals = np.empty((n, 3))
    gtrip = np.empty((n, 3))
    for k, t in enumerate(ts):
        frames[k] = curve.frame(t)
        contacts[k] = curve.point(t)
        normals[k] = frames[k][:, 2]
        d = curve.darboux(t)
        gtrip[k] = (d.kappa_g, d.kappa_n, d.tau_g)

    def gamma_fn(t):
        d = curve.darboux(t)
        return np.array([d.kappa_g, d.kappa_n, d.tau_g])

    exists, t_bad = rolling_exists(gtrip, anti.triples, ts, refine=(gamma_fn, anti.triple_fn))
    if not exists:
        raise NotRolling(t_bad)

    A = np.einsum("nij,nkj->nik", frames, anti.frames)
    b = contacts - np.einsum("nij,nj->ni", A, anti.gamma)
    comp = np.column_stack(
        [gtrip[:, 2] - anti.triples[:, 2], anti.triples[:, 1] - gtrip[:, 1], np.zeros(n)]
    )
    omega = np.einsum("nij,nj->ni", frames, comp)
    return RigidMotionFamily(
        ts=ts, rotations=A, translations=b, omegas=omega, contacts=contacts,
        normals=normals, frames=frames, anti=anti, gamma_triples=gtrip,
        omega_components=comp,
    )


# --- instantaneous-motion classification ----------------------------------------


@dataclass(frozen=True)
class Standstill:
    pass


@dataclass(frozen=True)
class Translation:
    velocity: np.ndarray


@dataclass(frozen=True)
class Rotation:
    center: np.ndarray
    omega: np.ndarray


def classify_instantaneous(Q, v, contact=None, tol=1e-10):
    """Classify the velocity field x -> Qx + v of a rigid-motion family at one instant.

    Q must be skew-symmetric (to 1e-8 of its scale). Raises NoCenter for a
    screw motion: Q nonzero but Qx + v = 0 unsolvable. For a rotation the
    returned center is the point of the fixed axis closest to ``contact``
    (or to the origin when no contact point is given).
    """
    Q = np.asarray(Q, dtype=float)
    v = np.asarray(v, dtype=float)
    omega = vee(Q, check=True, tol=1e-8)
    wn = float(np.linalg.norm(omega))
    vn = float(np.linalg.norm(v))
    if wn < tol:
        if vn < tol:
            return Standstill()
        return Translation(velocity=v)
    # Qx + v = omega x x + v = 0 solvable iff v is orthogonal to omega
    if abs(float(omega @ v)) > max(tol, 1e-9 * wn * max(vn, 1.0)):
        raise NoCenter(f"screw motion: <omega, v> = {float(omega @ v):.3e}")
    x0 = np.cross(omega, v) / (wn * wn)
    anchor = np.zeros(3) if contact is None else np.asarray(contact, dtype=float)
    axis = omega / wn
    x0 = x0 + ((anchor - x0) @ axis) * axis
    return Rotation(center=x0, omega=omega)


def center_trajectory(family, r):
    """Trajectory of the ball center: f_t(p + r N_p), cross-checked against gamma + r N.

    Returns (points, crosscheck_residual).
    """
    p = family.contacts[0]
    N0 = family.normals[0]
    c0 = p + r * N0
    material = np.einsum("nij,j->ni", family.rotations, c0) + family.translations
    geometric = family.contacts + r * family.normals
    resid = float(np.max(np.linalg.norm(material - geometric, axis=1)))
    return material, resid


# --- high-level driver ------------------------------------------------------------


def rolling_grid(length, steps=None):
    n = int(steps) if steps else max(MIN_STEPS, int(np.ceil(length * STEPS_PER_UNIT)))
    return np.linspace(0.0, float(length), n + 1)


def roll_ball(chart, u0, v0, theta, r, length, steps=None, geodesic_steps=None):
    """Roll the ball B_r along the geodesic from (u0, v0) in direction theta.

    Returns (curve, family). Raises NotRolling (via build_motion) when the
    existence condition fails, e.g. from an umbilic point with r = 1/h.
    """
    if r == 0.0:
        raise ValueError("ball parameter r must be nonzero")
    curve = geodesic_from(chart, u0, v0, theta, length, steps=geodesic_steps)
    ts = rolling_grid(length, steps)
    p = curve.point(0.0)
    vel = curve.velocity(0.0)
    vel = vel / np.linalg.norm(vel)
    N_p = curve.normal(0.0)

    from functools import lru_cache

    @lru_cache(maxsize=None)
    def kappa_g(t):
        return curve.darboux(t).kappa_g

    anti = anti_develop(BallTarget(r), kappa_g, p, vel, N_p, ts)
    family = build_motion(curve, anti)
    return curve, family
