"""Pointwise curvature data: fundamental forms, shape operator, principal frame."""

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateChart, UmbilicInRegion
from ..numutil import cross3, solve2

EPS_REG = 1e-10
EPS_UMBILIC = 1e-7
EPS_ORTH = 1e-8
EPS_CURV = 1e-8


@dataclass(frozen=True)
class PointGeometry:
    """Curvature data of a chart at one parameter point.

    kappa1 >= kappa2 are the principal curvatures w.r.t. the oriented unit
    normal; (e1, e2, normal) is a positively oriented orthonormal frame with
    e1 the kappa1-direction. At umbilics the tangent pair is an arbitrary
    orthonormal choice and ``is_umbilic`` is set.
    """

    u: float
    v: float
    position: np.ndarray
    normal: np.ndarray
    first_form: tuple  # (E, F, G)
    second_form: tuple  # (e, f, g)
    kappa1: float
    kappa2: float
    e1: np.ndarray
    e2: np.ndarray
    mean_curvature: float
    gaussian_curvature: float
    is_umbilic: bool

    @property
    def h(self):
        return self.mean_curvature


def _canonical_sign(w):
    # deterministic sign: largest-magnitude component made positive
    i = int(np.argmax(np.abs(w)))
    return -w if w[i] < 0 else w


def evaluate_point_geometry(chart, u, v):
    """Full curvature data at (u, v); raises OutOfDomain / DegenerateChart."""
    chart.require_inside(u, v)
    jet = chart.jet(u, v)
    return point_geometry_from_jet(chart, u, v, jet)


def point_geometry_from_jet(chart, u, v, jet):
    r, ru, rv, ruu, ruv, rvv = jet
    n = np.cross(ru, rv)
    nn = np.linalg.norm(n)
    scale = max(1.0, np.linalg.norm(ru) * np.linalg.norm(rv))
    if nn < EPS_REG * scale:
        raise DegenerateChart(f"|r_u x r_v| = {nn:.3e} at (u, v) = ({u}, {v})")
    N = n / nn
    if chart.orientation_flip:
        N = -N

    E, F, G = float(ru @ ru), float(ru @ rv), float(rv @ rv)
    e, f, g = float(ruu @ N), float(ruv @ N), float(rvv @ N)

    W = E * G - F * F
    K = (e * g - f * f) / W
    H = (e * G - 2.0 * f * F + g * E) / (2.0 * W)
    disc = math_sqrt_clamped(H * H - K)
    # below the sqrt rounding floor the split is pure noise; snap to umbilic
    if disc < 4.0 * np.sqrt(np.finfo(float).eps) * max(abs(H), np.sqrt(abs(K)), 1.0):
        disc = 0.0
    k1, k2 = H + disc, H - disc

    eps_umb = EPS_UMBILIC * max(abs(k1), abs(k2), 1.0)
    umbilic = (k1 - k2) < eps_umb

    if umbilic:
        e1 = ru / np.linalg.norm(ru)
    else:
        # null vector of (II - kappa1 * I); rows of the symmetric 2x2 pencil
        row_a = (e - k1 * E, f - k1 * F)
        row_b = (f - k1 * F, g - k1 * G)
        row = row_a if np.hypot(*row_a) >= np.hypot(*row_b) else row_b
        a, b = -row[1], row[0]
        w = a * ru + b * rv
        e1 = w / np.linalg.norm(w)
    e1 = _canonical_sign(e1)
    e2 = np.cross(N, e1)

    return PointGeometry(
        u=float(u), v=float(v), position=r, normal=N,
        first_form=(E, F, G), second_form=(e, f, g),
        kappa1=float(k1), kappa2=float(k2), e1=e1, e2=e2,
        mean_curvature=float(H), gaussian_curvature=float(K),
        is_umbilic=bool(umbilic),
    )


def math_sqrt_clamped(x):
    return float(np.sqrt(max(x, 0.0)))


def normal_derivatives(chart, u, v, jet=None):
    """(N, N_u, N_v) of the oriented unit normal, from the analytic jet."""
    _, ru, rv, ruu, ruv, rvv = jet if jet is not None else chart.jet(u, v)
    n = cross3(ru, rv)
    nn = np.linalg.norm(n)
    N = n / nn
    nu = cross3(ruu, rv) + cross3(ru, ruv)
    nv = cross3(ruv, rv) + cross3(ru, rvv)
    Nu = (nu - N * (N @ nu)) / nn
    Nv = (nv - N * (N @ nv)) / nn
    if chart.orientation_flip:
        return -N, -Nu, -Nv
    return N, Nu, Nv


def shape_operator_apply(chart, u, v, X):
    """S(X) = -dN(X) for an ambient tangent vector X at (u, v)."""
    jet = chart.jet(u, v)
    a, b = tangent_coordinates(jet, X)
    _, Nu, Nv = normal_derivatives(chart, u, v)
    return -(a * Nu + b * Nv)


def tangent_coordinates(jet, X):
    """Chart coordinates (a, b) with X = a r_u + b r_v (least squares in the metric)."""
    _, ru, rv = jet[0], jet[1], jet[2]
    a, b = solve2(ru @ ru, ru @ rv, rv @ rv, ru @ X, rv @ X)
    return float(a), float(b)


@dataclass(frozen=True)
class PrincipalFrameField:
    """Continuous (sign-propagated) principal frame on a rectangular grid."""

    us: np.ndarray
    vs: np.ndarray
    e1: np.ndarray  # (nu, nv, 3)
    e2: np.ndarray
    points: np.ndarray


def principal_frame_field(chart, region=None, grid=(16, 16)):
    """Principal directions on a grid, sign-aligned by propagation from the corner.

    Raises UmbilicInRegion when any grid sample is umbilic (directions are
    undefined there, so no continuous choice exists).
    """
    if region is None:
        region = chart.domain_inset()
    (u0, u1), (v0, v1) = region
    nu, nv = grid
    us = np.linspace(u0, u1, nu)
    vs = np.linspace(v0, v1, nv)
    e1 = np.empty((nu, nv, 3))
    e2 = np.empty((nu, nv, 3))
    pts = np.empty((nu, nv, 3))
    normals = np.empty((nu, nv, 3))
    for i, uu in enumerate(us):
        for j, vv in enumerate(vs):
            pg = evaluate_point_geometry(chart, uu, vv)
            if pg.is_umbilic:
                raise UmbilicInRegion(f"umbilic sample at (u, v) = ({uu}, {vv})")
            e1[i, j], e2[i, j] = pg.e1, pg.e2
            pts[i, j], normals[i, j] = pg.position, pg.normal
    for i in range(nu):
        for j in range(nv):
            if i == 0 and j == 0:
                continue
            ref = e1[i, j - 1] if j > 0 else e1[i - 1, j]
            if float(e1[i, j] @ ref) < 0.0:
                e1[i, j] = -e1[i, j]
                e2[i, j] = np.cross(normals[i, j], e1[i, j])
    return PrincipalFrameField(us=us, vs=vs, e1=e1, e2=e2, points=pts)


def validate_chart_derivatives(chart, samples, tol=5e-6):
    """Compare the analytic jet against finite differences of the map.

    Returns the worst relative mismatch over the samples; charts whose
    analytic derivatives disagree with the map beyond ``tol`` are broken.
    """
    worst = 0.0
    for u, v in samples:
        an = chart.jet(u, v)
        fd = chart.fd_jet(u, v)
        for a, b in zip(an, fd):
            scale = max(1.0, float(np.linalg.norm(a)))
            worst = max(worst, float(np.linalg.norm(a - b)) / scale)
    if worst > tol:
        raise DegenerateChart(f"analytic jet disagrees with finite differences: {worst:.3e}")
    return worst
