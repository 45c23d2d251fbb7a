"""FastAPI service wrapping the Green's-function pipeline.

Clients send FCIDUMP content inline and receive the artifact bundle
(file name -> text content) plus the run summary.  Configuration errors
map to 400, numerical failures to 422.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..pipeline import (
    ConfigError,
    NumericalError,
    RunConfig,
    freeze_oracle,
    run_compare,
    run_fci,
    run_gf,
)
from .models import CompareRequest, FciRequest, GfRequest, HealthResponse, RunResponse


def create_app() -> FastAPI:
    app = FastAPI(
        title="qsegf",
        version=__version__,
        description="Imaginary-time molecular Green's functions from a "
        "simulated VQE + subspace-expansion pipeline",
    )

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(NumericalError)
    async def _numerical_error(request: Request, exc: NumericalError):
        return JSONResponse(
            status_code=422, content={"detail": str(exc), "kind": "numerical"}
        )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/gf", response_model=RunResponse)
    def gf(req: GfRequest) -> RunResponse:
        config = RunConfig(
            fcidump_path=req.fcidump_path,
            rotation_path=req.rotation_path,
            beta=req.beta,
            n_max=req.n_max,
            ansatz_mode=req.ansatz_mode,
            gtol=req.gtol,
            max_iter=req.max_iter,
            mode=req.mode,
            shots=req.shots,
            bins=req.bins,
            seed=req.seed,
            epsilon=req.epsilon,
            with_oracle=req.with_oracle,
            dump_subspace=req.dump_subspace,
        )
        result = run_gf(config, req.fcidump, req.rotation)
        return RunResponse(summary=result.summary, files=result.files)

    @app.post("/fci", response_model=RunResponse)
    def fci(req: FciRequest) -> RunResponse:
        config = RunConfig(
            fcidump_path=req.fcidump_path, beta=req.beta, n_max=req.n_max, seed=req.seed
        )
        result = run_fci(config, req.fcidump)
        return RunResponse(summary=result.summary, files=result.files)

    @app.post("/compare", response_model=RunResponse)
    def compare(req: CompareRequest) -> RunResponse:
        result = run_compare(req.g_a, req.g_b)
        return RunResponse(summary=result.summary, files=result.files)

    @app.post("/freeze-oracle", response_model=RunResponse)
    def freeze(req: FciRequest) -> RunResponse:
        config = RunConfig(
            fcidump_path=req.fcidump_path, beta=req.beta, n_max=req.n_max, seed=req.seed
        )
        result = freeze_oracle(config, req.fcidump)
        return RunResponse(summary=result.summary, files=result.files)

    return app


app = create_app()
