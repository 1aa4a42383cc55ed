"""Parametric C2 surface charts and the built-in surface library.

A chart maps a rectangular (u, v) domain into 3-space and can produce the
full second-order jet (r, r_u, r_v, r_uu, r_uv, r_vv) at any interior point.
Built-in charts carry hand-coded analytic jets; user charts without them
fall back to central finite differences of the map.
"""

import math
import re
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from ..errors import OutOfDomain
from ..numutil import FD_STEP_FIRST, FD_STEP_SECOND


class ChartJet(NamedTuple):
    r: np.ndarray
    ru: np.ndarray
    rv: np.ndarray
    ruu: np.ndarray
    ruv: np.ndarray
    rvv: np.ndarray


@dataclass(frozen=True)
class SurfaceChart:
    """A regular parametric surface patch over a closed rectangle.

    ``orientation_flip`` negates the unit normal (and with it the second
    fundamental form and both principal curvatures).
    ``known_curvatures`` holds the exact constant (kappa1, kappa2) for the
    built-ins that have them (plane, sphere, cylinder), already adjusted
    for the chart's orientation.
    """

    kind: str
    params: dict
    domain: tuple  # ((u_min, u_max), (v_min, v_max))
    point_fn: Callable
    jet_fn: Callable | None = None
    orientation_flip: bool = False
    known_curvatures: tuple | None = None

    def point(self, u, v):
        return np.asarray(self.point_fn(u, v), dtype=float)

    def jet(self, u, v):
        """Second-order jet; analytic when available, else finite differences."""
        if self.jet_fn is not None:
            return ChartJet(*(np.asarray(a, dtype=float) for a in self.jet_fn(u, v)))
        return self.fd_jet(u, v)

    def fd_jet(self, u, v):
        """Jet from central differences of the map (also used to validate analytic jets)."""
        p = self.point_fn
        h1 = FD_STEP_FIRST * max(1.0, abs(u))
        k1 = FD_STEP_FIRST * max(1.0, abs(v))
        h2 = FD_STEP_SECOND * max(1.0, abs(u))
        k2 = FD_STEP_SECOND * max(1.0, abs(v))
        r = np.asarray(p(u, v), dtype=float)
        ru = (np.asarray(p(u + h1, v)) - np.asarray(p(u - h1, v))) / (2 * h1)
        rv = (np.asarray(p(u, v + k1)) - np.asarray(p(u, v - k1))) / (2 * k1)
        ruu = (np.asarray(p(u + h2, v)) - 2 * r + np.asarray(p(u - h2, v))) / h2**2
        rvv = (np.asarray(p(u, v + k2)) - 2 * r + np.asarray(p(u, v - k2))) / k2**2
        ruv = (
            np.asarray(p(u + h2, v + k2))
            - np.asarray(p(u + h2, v - k2))
            - np.asarray(p(u - h2, v + k2))
            + np.asarray(p(u - h2, v - k2))
        ) / (4 * h2 * k2)
        return ChartJet(r, ru, rv, ruu, ruv, rvv)

    def contains(self, u, v, slack=0.0):
        (u0, u1), (v0, v1) = self.domain
        return (u0 - slack) <= u <= (u1 + slack) and (v0 - slack) <= v <= (v1 + slack)

    def require_inside(self, u, v):
        if not self.contains(u, v):
            raise OutOfDomain(u, v, self.domain)

    def with_orientation(self, flip):
        known = self.known_curvatures
        if known is not None and flip != self.orientation_flip:
            known = (-known[1], -known[0])
        return replace(self, orientation_flip=flip, known_curvatures=known)

    def domain_inset(self, fraction=0.05):
        """The domain rectangle shrunk by ``fraction`` on every side."""
        (u0, u1), (v0, v1) = self.domain
        du, dv = (u1 - u0) * fraction, (v1 - v0) * fraction
        return ((u0 + du, u1 - du), (v0 + dv, v1 - dv))


def plane(extent=10.0):
    """The z = 0 plane; normal is +z."""

    def pt(u, v):
        return np.array([u, v, 0.0])

    def jet(u, v):
        z = np.zeros(3)
        return (np.array([u, v, 0.0]), np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), z, z, z)

    dom = ((-extent, extent), (-extent, extent))
    return SurfaceChart("plane", {"extent": extent}, dom, pt, jet, known_curvatures=(0.0, 0.0))


def sphere(R=1.0, orientation="inward", center=(0.0, 0.0, 0.0)):
    """Sphere of radius R; u is azimuth, v polar angle (poles excluded).

    With ``orientation='inward'`` the normal points toward the center and both
    principal curvatures equal +1/R.
    """
    if R <= 0:
        raise ValueError("sphere radius must be positive")
    c = np.asarray(center, dtype=float)

    def pt(u, v):
        return c + R * np.array([math.cos(u) * math.sin(v), math.sin(u) * math.sin(v), math.cos(v)])

    def jet(u, v):
        cu, su, cv, sv = math.cos(u), math.sin(u), math.cos(v), math.sin(v)
        r = c + R * np.array([cu * sv, su * sv, cv])
        ru = R * np.array([-su * sv, cu * sv, 0.0])
        rv = R * np.array([cu * cv, su * cv, -sv])
        ruu = R * np.array([-cu * sv, -su * sv, 0.0])
        ruv = R * np.array([-su * cv, cu * cv, 0.0])
        rvv = R * np.array([-cu * sv, -su * sv, -cv])
        return r, ru, rv, ruu, ruv, rvv

    # r_u x r_v points toward the center for this parametrization
    flip = orientation != "inward"
    kappa = 1.0 / R
    known = (kappa, kappa) if not flip else (-kappa, -kappa)
    dom = ((-4 * math.pi, 4 * math.pi), (0.15, math.pi - 0.15))
    return SurfaceChart(
        "sphere", {"R": R, "orientation": orientation}, dom, pt, jet,
        orientation_flip=flip, known_curvatures=known,
    )


def cylinder(R=1.0, orientation="inward", height=10.0):
    """Circular cylinder of radius R about the z axis; u is angle, v height."""
    if R <= 0:
        raise ValueError("cylinder radius must be positive")

    def pt(u, v):
        return np.array([R * math.cos(u), R * math.sin(u), v])

    def jet(u, v):
        cu, su = math.cos(u), math.sin(u)
        z = np.zeros(3)
        r = np.array([R * cu, R * su, v])
        ru = np.array([-R * su, R * cu, 0.0])
        rv = np.array([0.0, 0.0, 1.0])
        ruu = np.array([-R * cu, -R * su, 0.0])
        return r, ru, rv, ruu, z, z
    # r_u x r_v points outward; flip for the inward orientation
    flip = orientation == "inward"
    kappa = 1.0 / R
    known = (kappa, 0.0) if flip else (0.0, -kappa)
    dom = ((-4 * math.pi, 4 * math.pi), (-height, height))
    return SurfaceChart(
        "cylinder", {"R": R, "orientation": orientation}, dom, pt, jet,
        orientation_flip=flip, known_curvatures=known,
    )


def ellipsoid(a=1.5, b=1.0, c=0.75, orientation="inward"):
    """Triaxial ellipsoid; normal toward the interior by default."""
    if min(a, b, c) <= 0:
        raise ValueError("ellipsoid semi-axes must be positive")

    def pt(u, v):
        return np.array([a * math.cos(u) * math.sin(v), b * math.sin(u) * math.sin(v), c * math.cos(v)])

    def jet(u, v):
        cu, su, cv, sv = math.cos(u), math.sin(u), math.cos(v), math.sin(v)
        r = np.array([a * cu * sv, b * su * sv, c * cv])
        ru = np.array([-a * su * sv, b * cu * sv, 0.0])
        rv = np.array([a * cu * cv, b * su * cv, -c * sv])
        ruu = np.array([-a * cu * sv, -b * su * sv, 0.0])
        ruv = np.array([-a * su * cv, b * cu * cv, 0.0])
        rvv = np.array([-a * cu * sv, -b * su * sv, -c * cv])
        return r, ru, rv, ruu, ruv, rvv

    flip = orientation != "inward"
    dom = ((-2 * math.pi, 2 * math.pi), (0.15, math.pi - 0.15))
    return SurfaceChart(
        "ellipsoid", {"a": a, "b": b, "c": c, "orientation": orientation},
        dom, pt, jet, orientation_flip=flip,
    )


def torus(R_major=2.0, r_minor=1.0):
    """Torus of revolution about the z axis (normal outward from the tube)."""
    if not (R_major > r_minor > 0):
        raise ValueError("torus needs R_major > r_minor > 0")
    R, r = R_major, r_minor

    def pt(u, v):
        w = R + r * math.cos(v)
        return np.array([w * math.cos(u), w * math.sin(u), r * math.sin(v)])

    def jet(u, v):
        cu, su, cv, sv = math.cos(u), math.sin(u), math.cos(v), math.sin(v)
        w = R + r * cv
        rr = np.array([w * cu, w * su, r * sv])
        ru = np.array([-w * su, w * cu, 0.0])
        rv = np.array([-r * sv * cu, -r * sv * su, r * cv])
        ruu = np.array([-w * cu, -w * su, 0.0])
        ruv = np.array([r * sv * su, -r * sv * cu, 0.0])
        rvv = np.array([-r * cv * cu, -r * cv * su, -r * sv])
        return rr, ru, rv, ruu, ruv, rvv

    dom = ((-2 * math.pi, 2 * math.pi), (-2 * math.pi, 2 * math.pi))
    return SurfaceChart("torus", {"R_major": R, "r_minor": r}, dom, pt, jet)


def catenoid(c=1.0, v_extent=1.5):
    """Catenoid x^2 + y^2 = (c cosh(z/c))^2, the standard minimal surface."""
    if c <= 0:
        raise ValueError("catenoid waist parameter must be positive")

    def pt(u, v):
        w = c * math.cosh(v / c)
        return np.array([w * math.cos(u), w * math.sin(u), v])

    def jet(u, v):
        cu, su = math.cos(u), math.sin(u)
        w = c * math.cosh(v / c)
        dw = math.sinh(v / c)
        ddw = math.cosh(v / c) / c
        r = np.array([w * cu, w * su, v])
        ru = np.array([-w * su, w * cu, 0.0])
        rv = np.array([dw * cu, dw * su, 1.0])
        ruu = np.array([-w * cu, -w * su, 0.0])
        ruv = np.array([-dw * su, dw * cu, 0.0])
        rvv = np.array([ddw * cu, ddw * su, 0.0])
        return r, ru, rv, ruu, ruv, rvv

    dom = ((-2 * math.pi, 2 * math.pi), (-v_extent, v_extent))
    return SurfaceChart("catenoid", {"c": c, "v_extent": v_extent}, dom, pt, jet)


# --- graph surfaces z = phi(x, y) from an expression string -------------------

_ALLOWED_FUNCTIONS = ("sin", "cos", "exp", "sqrt")
_TOKEN_RE = re.compile(r"^[\s0-9a-zA-Z_+\-*/^().,]*$")


def _parse_expression(text):
    import sympy
    from sympy.parsing.sympy_parser import (
        convert_xor,
        parse_expr,
        standard_transformations,
    )

    if not _TOKEN_RE.match(text):
        raise ValueError(f"expression contains unsupported characters: {text!r}")
    x, y = sympy.symbols("x y")
    local = {"x": x, "y": y, "pi": sympy.pi}
    local.update({name: getattr(sympy, name) for name in _ALLOWED_FUNCTIONS})
    # minimal namespace: just the constructors the tokenizer emits
    constructors = {
        name: getattr(sympy, name)
        for name in ("Integer", "Float", "Rational", "Symbol", "Function")
    }
    expr = parse_expr(
        text,
        local_dict=local,
        global_dict=constructors,
        transformations=standard_transformations + (convert_xor,),
    )
    if not expr.free_symbols <= {x, y}:
        bad = expr.free_symbols - {x, y}
        raise ValueError(f"unknown symbols in expression: {sorted(map(str, bad))}")
    for f in expr.atoms(sympy.Function):
        if f.func.__name__ not in _ALLOWED_FUNCTIONS:
            raise ValueError(f"function {f.func.__name__!r} not allowed")
    return expr, (x, y)


def graph_surface(expression, extent=2.0):
    """Graph z = phi(x, y) with phi given as text in x, y.

    Accepts + - * / ^ and sin, cos, exp, sqrt; derivatives are symbolic.
    """
    import sympy

    expr, (x, y) = _parse_expression(expression)
    fs = [expr, expr.diff(x), expr.diff(y), expr.diff(x, 2), expr.diff(x, y), expr.diff(y, 2)]
    f, fx, fy, fxx, fxy, fyy = [sympy.lambdify((x, y), e, "math") for e in fs]

    def pt(u, v):
        return np.array([u, v, f(u, v)])

    def jet(u, v):
        r = np.array([u, v, f(u, v)])
        ru = np.array([1.0, 0.0, fx(u, v)])
        rv = np.array([0.0, 1.0, fy(u, v)])
        ruu = np.array([0.0, 0.0, fxx(u, v)])
        ruv = np.array([0.0, 0.0, fxy(u, v)])
        rvv = np.array([0.0, 0.0, fyy(u, v)])
        return r, ru, rv, ruu, ruv, rvv

    dom = ((-extent, extent), (-extent, extent))
    return SurfaceChart("graph", {"expression": expression, "extent": extent}, dom, pt, jet)


# --- config-file loading ------------------------------------------------------

_BUILDERS = {}


def _register_builders():
    from .unduloid import unduloid

    _BUILDERS.update(
        plane=plane, sphere=sphere, cylinder=cylinder, ellipsoid=ellipsoid,
        torus=torus, catenoid=catenoid, unduloid=unduloid, graph=graph_surface,
    )


def build_chart(kind, **params):
    """Dispatch to a built-in chart constructor by name."""
    if not _BUILDERS:
        _register_builders()
    if kind not in _BUILDERS:
        raise ValueError(f"unknown surface kind {kind!r}; choose from {sorted(_BUILDERS)}")
    flip = params.pop("orientation_flip", None)
    u_range = params.pop("u_range", None)
    v_range = params.pop("v_range", None)
    chart = _BUILDERS[kind](**params)
    if flip is not None:
        chart = chart.with_orientation(bool(flip))
    if u_range is not None or v_range is not None:
        dom = (tuple(u_range or chart.domain[0]), tuple(v_range or chart.domain[1]))
        chart = replace(chart, domain=dom)
    return chart


def parse_config_text(text):
    """Parse `key = value` lines (# starts a comment) into a string dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _coerce(value):
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return float(value)
    except ValueError:
        return value


def chart_from_config(source):
    """Build a chart from config text, a mapping, or a file path."""
    if isinstance(source, dict):
        entries = dict(source)
    else:
        text = str(source)
        if "\n" not in text and "=" not in text:
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
        entries = parse_config_text(text)
    if "kind" not in entries:
        raise ValueError("surface config needs a 'kind' entry")
    kind = entries.pop("kind")
    params = {}
    for key, value in entries.items():
        if key in ("u_min", "u_max", "v_min", "v_max"):
            continue
        params[key] = _coerce(value) if isinstance(value, str) else value
    for axis in ("u", "v"):
        lo, hi = entries.get(f"{axis}_min"), entries.get(f"{axis}_max")
        if lo is not None and hi is not None:
            params[f"{axis}_range"] = (float(lo), float(hi))
    if kind == "graph" and "expression" not in params:
        raise ValueError("graph surface config needs an 'expression' entry")
    return build_chart(kind, **params)
