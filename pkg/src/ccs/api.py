"""HTTP JSON API over the pipeline, consumed by the browser UI.

Endpoints:

    POST /queries                   build + save a query
    GET  /queries                   list saved queries
    POST /queries/{name}/search     resolve a query to PMIDs
    POST /runs                      execute the pipeline
    GET  /runs/{id}                 run record (statuses, timings)
    GET  /runs/{id}/relevance       per-article ranked sentences
    GET  /runs/{id}/summaries       summary table (?sort=score|pmid)
    GET  /runs/{id}/entities        ranked entity table

Errors are always ``{"code": ..., "message": ...}`` with 404 for unknown
resources, 409 for duplicate names, 422 for validation problems, and 502
when the scorer bridge or upstream network fails.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import errors
from .pipeline import Pipeline, RunOptions
from .query import Term, build_query
from .settings import Settings

_STATUS_BY_ERROR = (
    (errors.DuplicateName, 409, "duplicate_name"),
    (errors.UnknownQuery, 404, "unknown_query"),
    (errors.UnknownRun, 404, "unknown_run"),
    (errors.UnknownPmid, 422, "unknown_pmid"),
    (errors.ScorerUnavailable, 502, "scorer_unavailable"),
    (errors.QuotaExceeded, 502, "quota_exceeded"),
    (errors.NetworkError, 502, "network_error"),
    (errors.MalformedResponse, 502, "malformed_upstream_response"),
    (errors.OfflineViolation, 502, "offline_violation"),
    (errors.UserInputError, 422, "invalid_input"),
    (errors.EnvironmentFailure, 500, "environment_failure"),
)


class TermModel(BaseModel):
    text: str
    is_mesh: bool = False


class QueryCreate(BaseModel):
    disease: str
    name: str | None = None
    synonyms: list[str] = Field(default_factory=list)
    interventions: list[TermModel] = Field(default_factory=list)
    outcomes: list[TermModel] = Field(default_factory=list)
    disease_mesh: str | None = None
    cancer_defaults: bool = False
    use_default_terms: bool = False
    dry_run: bool = False  # render a preview without saving


class SearchBody(BaseModel):
    cap: int = 100
    offline: bool = False


class RunCreate(BaseModel):
    query_name: str
    k: int = 4
    threshold: float = 0.5
    scorer: str = "baseline"
    cap: int = 100
    offline: bool = False
    sort: str = "score"


def create_app(pipeline: Pipeline | None = None, settings: Settings | None = None) -> FastAPI:
    pipeline = pipeline or Pipeline(settings or Settings.resolve())
    app = FastAPI(title="ccs-pipeline", version="0.1.0")

    @app.exception_handler(errors.CcsError)
    async def handle_ccs_error(request: Request, exc: errors.CcsError):
        for cls, status, code in _STATUS_BY_ERROR:
            if isinstance(exc, cls):
                return JSONResponse({"code": code, "message": str(exc)}, status_code=status)
        return JSONResponse({"code": "internal_error", "message": str(exc)}, status_code=500)

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return JSONResponse(
            {"code": "validation_error", "message": str(exc.errors()[:3])},
            status_code=422,
        )

    @app.post("/queries", status_code=201)
    def create_query(body: QueryCreate, response: Response):
        spec = build_query(
            body.disease,
            interventions=[Term(t.text, t.is_mesh) for t in body.interventions],
            outcomes=[Term(t.text, t.is_mesh) for t in body.outcomes],
            synonyms=body.synonyms,
            name=body.name,
            disease_mesh=body.disease_mesh,
            cancer=body.cancer_defaults,
            use_default_terms=body.use_default_terms,
        )
        if body.dry_run:
            response.status_code = 200
            return {"name": spec.name, "rendered": spec.rendered, "saved": False}
        pipeline.store.save_query(spec)
        return {"name": spec.name, "rendered": spec.rendered, "created_at": spec.created_at}

    @app.get("/queries")
    def list_queries():
        return [
            {
                "name": s.name,
                "disease": s.disease,
                "rendered": s.rendered,
                "created_at": s.created_at,
            }
            for s in pipeline.store.list_queries()
        ]

    @app.post("/queries/{name}/search")
    def search_query(name: str, body: SearchBody | None = None):
        body = body or SearchBody()
        spec = pipeline.store.get_query(name)
        result = pipeline.client(body.offline).search(spec, cap=body.cap)
        return {
            "query_name": name,
            "pmids": result.pmids,
            "total_count": result.total_count,
            "retrieved_at": result.retrieved_at,
        }

    @app.post("/runs", status_code=201)
    def create_run(body: RunCreate):
        record, bundle = pipeline.run(
            body.query_name,
            RunOptions(
                k=body.k,
                threshold=body.threshold,
                scorer=body.scorer,
                cap=body.cap,
                offline=body.offline,
                sort=body.sort,
            ),
        )
        return {"run_id": record.run_id, "record": record.to_dict()}

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        record = pipeline.store.get_run_record(run_id)
        return {**record, "status": "complete"}

    @app.get("/runs/{run_id}/relevance")
    def get_relevance(run_id: str):
        return pipeline.store.get_run_bundle(run_id)["relevance"]

    @app.get("/runs/{run_id}/summaries")
    def get_summaries(run_id: str, sort: str = "score"):
        rows = pipeline.store.get_run_bundle(run_id)["summaries"]
        if sort == "pmid":
            rows = sorted(rows, key=lambda r: int(r["pmid"]))
        elif sort == "score":
            rows = sorted(rows, key=lambda r: (-r["summary_score"], int(r["pmid"])))
        else:
            raise errors.UserInputError(f"unknown sort order: {sort!r}")
        return rows

    @app.get("/runs/{run_id}/entities")
    def get_entities(run_id: str):
        return pipeline.store.get_run_bundle(run_id)["entities"]

    for candidate in (
        os.environ.get("CCS_UI_DIR"),
        Path("frontend/dist"),
        Path(__file__).resolve().parents[2] / "frontend" / "dist",
    ):
        if candidate and Path(candidate).is_dir():
            app.mount("/ui", StaticFiles(directory=candidate, html=True), name="ui")
            break

    return app
