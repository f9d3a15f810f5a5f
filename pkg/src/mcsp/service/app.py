"""HTTP front end: every package operation as a request/response route.

Domain errors (bad tables, mismatched scopes, oversized searches) raise
ValueError inside the package and map to 400; shape errors are caught by
the request models as 422.  Verdicts do not affect the status code; an
APX-complete classification is still a successful computation.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from . import models, ops


def create_app() -> FastAPI:
    app = FastAPI(
        title="mcsp",
        version=__version__,
        description="Max CSP dichotomy toolkit: supermodularity classification, "
        "anti-Monge recognition, strict implementations, solvers, and the "
        "exhaustive case searches.",
    )

    @app.exception_handler(ValueError)
    async def domain_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=models.Health)
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    # classification and catalog reports omit unset keys rather than
    # sending nulls, matching the shipped schemas and the CLI output
    @app.post(
        "/classify",
        response_model=models.ClassificationReport,
        response_model_exclude_none=True,
    )
    def classify(language: models.LanguageFile) -> dict:
        return ops.classify_language(language.to_language())

    @app.post("/monge/check", response_model=models.MongeCheckReport)
    def monge_check(
        matrix: models.MatrixFile,
        method: Literal["adjacent", "full", "both"] = "adjacent",
    ) -> dict:
        return ops.monge_check(matrix.to_matrix(), method)

    @app.post("/monge/permute", response_model=models.MongePermuteReport)
    def monge_permute(matrix: models.MatrixFile) -> dict:
        return ops.monge_permute(matrix.to_matrix())

    @app.post("/verify-impl", response_model=models.VerifyImplReport)
    def verify_impl(impl: models.ImplementationFile) -> dict:
        return ops.verify_implementation(impl.to_implementation())

    @app.get(
        "/verify-impl/catalog",
        response_model=models.CatalogVerifyReport,
        response_model_exclude_none=True,
    )
    def verify_catalog() -> dict:
        return ops.verify_catalog()

    @app.post("/solve", response_model=models.SolveReport)
    def solve(req: models.SolveRequest) -> dict:
        return ops.solve(req.instance.to_instance(), req.method)

    @app.post(
        "/hcolor/classify",
        response_model=models.ClassificationReport,
        response_model_exclude_none=True,
    )
    def hcolor_classify(digraph: models.DigraphFile) -> dict:
        return ops.classify_hcolor(digraph.to_digraph())

    @app.post("/hcolor/instance", response_model=models.InstanceFile)
    def hcolor_instance(req: models.HcolorInstanceRequest) -> dict:
        return ops.hcolor_instance(
            req.g.to_digraph(),
            req.h.to_digraph(),
            req.lists,
            req.scores,
            req.weight_map(),
        )

    @app.post("/reproduce/{case}", response_model=models.ReproduceReport)
    def reproduce(
        case: Literal["case1", "case2", "case3"],
        req: models.ReproduceRequest | None = None,
    ) -> dict:
        req = req or models.ReproduceRequest()
        return ops.reproduce(case, audit=req.audit)

    return app


app = create_app()
