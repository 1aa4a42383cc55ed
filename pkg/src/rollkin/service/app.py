"""FastAPI service exposing the rolling experiments as stateless endpoints."""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import (
    BadDirections,
    DegenerateChart,
    DomainExit,
    NotRolling,
    OutOfDomain,
    RollkinError,
    SingularCurve,
    UmbilicInRegion,
)
from ..experiments import (
    classify_constant_speed,
    cmc_radius,
    isotropy_test,
    speed_landscape,
)
from ..geometry import evaluate_point_geometry
from ..rolling import center_trajectory, roll_ball
from . import schemas

_BAD_INPUT = (OutOfDomain, DegenerateChart, BadDirections, SingularCurve,
              UmbilicInRegion, DomainExit)


def create_app():
    app = FastAPI(title="rollkin", version=__version__)

    @app.exception_handler(RollkinError)
    async def rollkin_error(request: Request, exc: RollkinError):
        name = type(exc).__name__
        if isinstance(exc, NotRolling):
            return JSONResponse(
                status_code=409,
                content={"error": name, "message": str(exc), "t": exc.t},
            )
        if isinstance(exc, _BAD_INPUT):
            return JSONResponse(status_code=400, content={"error": name, "message": str(exc)})
        # StepFailure, NoCenter and anything else numerical
        return JSONResponse(status_code=500, content={"error": name, "message": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "ValueError", "message": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/surfaces")
    def surfaces():
        return {
            "kinds": ["plane", "sphere", "cylinder", "ellipsoid", "torus",
                      "catenoid", "unduloid", "graph"]
        }

    @app.post("/curvature", response_model=schemas.CurvatureResponse)
    def curvature(req: schemas.CurvatureRequest):
        chart = req.surface.build()
        pg = evaluate_point_geometry(chart, req.u, req.v)
        return schemas.CurvatureResponse.from_point_geometry(pg)

    @app.post("/cmc-radius", response_model=schemas.CmcRadiusResponse)
    def cmc(req: schemas.CurvatureRequest):
        chart = req.surface.build()
        pg = evaluate_point_geometry(chart, req.u, req.v)
        return schemas.CmcRadiusResponse(
            u=pg.u, v=pg.v, radius=cmc_radius(pg), is_umbilic=pg.is_umbilic
        )

    @app.post("/roll", response_model=schemas.RollResponse)
    def roll(req: schemas.RollRequest):
        chart = req.surface.build()
        _, family = roll_ball(chart, req.u, req.v, req.theta, req.r, req.length, steps=req.steps)
        centers, crosscheck = center_trajectory(family, req.r)
        residuals = schemas.MotionResiduals(
            orthogonality=family.orthogonality_residual(),
            no_spin=family.no_spin_residual(),
            no_skid=family.no_skid_residual(),
            tangency=family.tangency_residual(),
            omega_agreement=family.omega_fd_residual(),
            center_crosscheck=crosscheck,
        )
        return schemas.RollResponse(
            times=[float(t) for t in family.ts],
            rotations=[[float(x) for x in A.reshape(-1)] for A in family.rotations],
            translations=[[float(x) for x in b] for b in family.translations],
            omegas=[[float(x) for x in w] for w in family.omegas],
            contacts=[[float(x) for x in c] for c in family.contacts],
            centers=[[float(x) for x in c] for c in centers],
            residuals=residuals,
        )

    @app.post("/isotropy", response_model=schemas.IsotropyResponse)
    def isotropy(req: schemas.IsotropyRequest):
        chart = req.surface.build()
        rep = isotropy_test(
            chart, req.u, req.v, req.r, req.thetas,
            simulate=req.simulate, arc=req.arc, tol_iso=req.tol_iso,
        )
        return schemas.IsotropyResponse.from_report(rep)

    @app.post("/classify", response_model=schemas.ClassifyResponse)
    def classify(req: schemas.ClassifyRequest):
        chart = req.surface.build()
        region = None
        if req.region is not None:
            region = (tuple(req.region[0]), tuple(req.region[1]))
        result = classify_constant_speed(
            chart, req.r, region=region, grid=tuple(req.grid),
            n_thetas=req.n_thetas, tol=req.tol,
        )
        return schemas.ClassifyResponse(
            verdict=result.verdict, radius=result.radius,
            speed_spread=result.speed_spread,
            kappa1_range=list(result.kappa1_range),
            kappa2_range=list(result.kappa2_range),
            r_matches_isotropy=result.r_matches_isotropy,
        )

    @app.post("/scan", response_model=schemas.ScanResponse)
    def scan(req: schemas.ScanRequest):
        chart = req.surface.build()
        samples = speed_landscape(
            chart, req.u, req.v, req.r_values, req.theta_values,
            simulate=req.simulate, arc=req.arc,
        )
        return schemas.ScanResponse(
            samples=[
                schemas.SpeedSampleModel(
                    u=s.u, v=s.v, r=s.r, theta=s.theta,
                    speed_closed=s.speed_closed, speed_simulated=s.speed_simulated,
                )
                for s in samples
            ]
        )

    return app


app = create_app()
