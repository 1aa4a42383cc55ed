from .charts import (
    ChartJet,
    SurfaceChart,
    build_chart,
    catenoid,
    chart_from_config,
    cylinder,
    ellipsoid,
    graph_surface,
    parse_config_text,
    plane,
    sphere,
    torus,
)
from .pointgeom import (
    PointGeometry,
    PrincipalFrameField,
    evaluate_point_geometry,
    normal_derivatives,
    principal_frame_field,
    shape_operator_apply,
    tangent_coordinates,
    validate_chart_derivatives,
)
from .unduloid import integrate_profile, profile_cmc_residual, unduloid

__all__ = [
    "ChartJet",
    "SurfaceChart",
    "PointGeometry",
    "PrincipalFrameField",
    "build_chart",
    "catenoid",
    "chart_from_config",
    "cylinder",
    "ellipsoid",
    "evaluate_point_geometry",
    "graph_surface",
    "integrate_profile",
    "normal_derivatives",
    "parse_config_text",
    "plane",
    "principal_frame_field",
    "profile_cmc_residual",
    "shape_operator_apply",
    "sphere",
    "tangent_coordinates",
    "torus",
    "unduloid",
    "validate_chart_derivatives",
]
