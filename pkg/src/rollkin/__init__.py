"""Kinematic rolling of balls (and general surfaces) on parametric surfaces.

The library computes Darboux-frame data of surface curves, constructs the
rigid-motion family of a rolling without skidding or spinning, and runs the
speed-isotropy experiments that single out constant-mean-curvature surfaces.
"""

__version__ = "0.1.0"

from . import errors
from .geometry import (
    SurfaceChart,
    build_chart,
    chart_from_config,
    evaluate_point_geometry,
)

__all__ = [
    "SurfaceChart",
    "build_chart",
    "chart_from_config",
    "errors",
    "evaluate_point_geometry",
    "__version__",
]
