"""Pydantic request/response models for the compute service."""

from pydantic import BaseModel, Field

Vec3 = list[float]


class SurfaceSpec(BaseModel):
    """A built-in surface selected by kind plus constructor parameters.

    Params mirror the library constructors: e.g. {"R": 1.0,
    "orientation": "inward"} for a cylinder, {"expression": "x^2 - y^2"}
    for a graph surface. ``orientation_flip`` and ``u_range``/``v_range``
    are accepted for any kind.
    """

    kind: str
    params: dict[str, float | int | bool | str | list[float]] = Field(default_factory=dict)

    def build(self):
        from ..geometry import build_chart

        params = dict(self.params)
        for key in ("u_range", "v_range"):
            if key in params:
                params[key] = tuple(params[key])
        return build_chart(self.kind, **params)


class CurvatureRequest(BaseModel):
    surface: SurfaceSpec
    u: float
    v: float


class CurvatureResponse(BaseModel):
    u: float
    v: float
    position: Vec3
    normal: Vec3
    first_form: list[float]
    second_form: list[float]
    kappa1: float
    kappa2: float
    e1: Vec3
    e2: Vec3
    mean_curvature: float
    gaussian_curvature: float
    is_umbilic: bool

    @classmethod
    def from_point_geometry(cls, pg):
        return cls(
            u=pg.u, v=pg.v,
            position=list(pg.position), normal=list(pg.normal),
            first_form=list(pg.first_form), second_form=list(pg.second_form),
            kappa1=pg.kappa1, kappa2=pg.kappa2,
            e1=list(pg.e1), e2=list(pg.e2),
            mean_curvature=pg.mean_curvature,
            gaussian_curvature=pg.gaussian_curvature,
            is_umbilic=pg.is_umbilic,
        )


class RollRequest(BaseModel):
    surface: SurfaceSpec
    u: float
    v: float
    theta: float
    r: float
    length: float = 0.01
    steps: int | None = None


class MotionResiduals(BaseModel):
    orthogonality: float
    no_spin: float
    no_skid: float
    tangency: float
    omega_agreement: float
    center_crosscheck: float


class RollResponse(BaseModel):
    times: list[float]
    rotations: list[list[float]]  # row-major 9 per sample
    translations: list[Vec3]
    omegas: list[Vec3]
    contacts: list[Vec3]
    centers: list[Vec3]
    residuals: MotionResiduals


class IsotropyRequest(BaseModel):
    surface: SurfaceSpec
    u: float
    v: float
    r: float
    thetas: list[float]
    simulate: bool = False
    arc: float = 0.01
    tol_iso: float = 1e-8


class IsotropyResponse(BaseModel):
    u: float
    v: float
    r: float
    thetas: list[float]
    speeds_closed: list[float]
    speeds_simulated: list[float] | None
    spread_closed: float
    spread_simulated: float | None
    verdict: str
    verdict_simulated: str | None
    relation: str
    coefficient_fit: float
    coefficient_closed: float

    @classmethod
    def from_report(cls, rep):
        return cls(
            u=rep.u, v=rep.v, r=rep.r, thetas=list(rep.thetas),
            speeds_closed=list(rep.speeds_closed),
            speeds_simulated=None if rep.speeds_simulated is None else list(rep.speeds_simulated),
            spread_closed=rep.spread_closed, spread_simulated=rep.spread_simulated,
            verdict=rep.verdict, verdict_simulated=rep.verdict_simulated,
            relation=rep.relation,
            coefficient_fit=rep.coefficient_fit,
            coefficient_closed=rep.coefficient_closed,
        )


class ClassifyRequest(BaseModel):
    surface: SurfaceSpec
    r: float
    region: list[list[float]] | None = None  # [[u0, u1], [v0, v1]]
    grid: list[int] = Field(default_factory=lambda: [12, 12])
    n_thetas: int = 8
    tol: float = 1e-8


class ClassifyResponse(BaseModel):
    verdict: str
    radius: float | None
    speed_spread: float
    kappa1_range: list[float]
    kappa2_range: list[float]
    r_matches_isotropy: bool | None


class ScanRequest(BaseModel):
    surface: SurfaceSpec
    u: float
    v: float
    r_values: list[float]
    theta_values: list[float]
    simulate: bool = False
    arc: float = 0.01


class SpeedSampleModel(BaseModel):
    u: float
    v: float
    r: float
    theta: float
    speed_closed: float
    speed_simulated: float | None = None


class ScanResponse(BaseModel):
    samples: list[SpeedSampleModel]


class CmcRadiusResponse(BaseModel):
    u: float
    v: float
    radius: float | None
    is_umbilic: bool
