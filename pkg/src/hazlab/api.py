"""HTTP interface to a project store.

One process serves one project. Reads work on committed snapshots;
every mutation goes through the store's transactional path, so the
optimistic-concurrency rules apply to API clients exactly as they do
to the library. Error payloads are always ``{"error": ...}``.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from hazlab.generate import compare_strategies, find_catalog
from hazlab.model import (
    HazlabError,
    Project,
    ReviewStatus,
    TargetKind,
    hazard_to_dict,
    phs_to_dict,
    project_to_dict,
    review_to_dict,
    trace_to_dict,
)
from hazlab.review import (
    DecisionCommand,
    NotFoundError,
    RejectedError,
    VersionConflictError,
)
from hazlab.store import ProjectStore

FALLBACK_PAGE = """<!doctype html>
<meta charset="utf-8">
<title>hazlab</title>
<h1>hazlab review service</h1>
<p>No review UI bundle is installed. The JSON API is live:
<a href="/api/project">/api/project</a>,
<a href="/api/phs">/api/phs</a>,
<a href="/api/report">/api/report</a>.</p>
"""


class DecisionBody(BaseModel):
    new_status: str
    expected_version: int = Field(ge=1)
    rationale: str = ""
    reviewer: str = ""


class HazardBody(BaseModel):
    phs_id: str
    source: str
    target: str
    initiating_mechanism: str
    description: str = ""
    target_kind: str = TargetKind.OTHER.value


class TraceBody(BaseModel):
    catalog: str | None = None


def _parse_status(value: str) -> ReviewStatus:
    try:
        return ReviewStatus(value)
    except ValueError as exc:
        raise RejectedError(f"unknown status {value!r}") from exc


def _parse_target_kind(value: str) -> TargetKind:
    try:
        return TargetKind(value)
    except ValueError as exc:
        raise RejectedError(f"unknown target kind {value!r}") from exc


def _project_summary(project: Project) -> dict:
    doc = project_to_dict(project)
    doc["counts"] = {
        "phs": len(doc.pop("phs")),
        "hazards": len(doc.pop("hazards")),
        "traces": len(doc.pop("traces")),
        "decisions": len(doc.pop("decision_log")),
    }
    return doc


def _phs_row(project: Project, phs) -> dict:
    row = phs_to_dict(phs)
    segment = project.segment_by_id(phs.segment)
    row["scenario"] = segment.scenario if segment else ""
    row["hazard_ids"] = [h.id for h in project.hazards_for_phs(phs.id)]
    return row


def _phs_detail(project: Project, phs) -> dict:
    row = _phs_row(project, phs)
    segment = project.segment_by_id(phs.segment)
    if segment:
        scenario = project.scenario_by_id(segment.scenario)
        row["scenario_title"] = scenario.title if scenario else ""
        row["desired_behavior"] = segment.desired_behavior
        row["segment_order"] = segment.order
    deviation = project.taxonomy.class_by_id(phs.deviation)
    row["deviation_label"] = deviation.display_label if deviation else ""
    row["hazards"] = [hazard_to_dict(h)
                      for h in project.hazards_for_phs(phs.id)]
    return row


def create_app(store: ProjectStore,
               ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="hazlab review service")

    @app.exception_handler(NotFoundError)
    async def not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(VersionConflictError)
    async def version_conflict(request: Request, exc: VersionConflictError):
        # 409 carries the committed state so clients can rebase.
        return JSONResponse(status_code=409, content={
            "error": str(exc),
            "phs": exc.phs_id,
            "current": review_to_dict(exc.current),
        })

    @app.exception_handler(HazlabError)
    async def domain_error(request: Request, exc: HazlabError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def bad_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={
            "error": "invalid request body",
            "detail": jsonable_encoder(exc.errors()),
        })

    @app.get("/api/project")
    def get_project() -> dict:
        return _project_summary(store.snapshot())

    @app.get("/api/phs")
    def list_phs(status: str | None = None,
                 scenario: str | None = None) -> list[dict]:
        project = store.snapshot()
        wanted = _parse_status(status) if status else None
        rows = []
        for phs in project.phs_set:
            if wanted and phs.review.status is not wanted:
                continue
            row = _phs_row(project, phs)
            if scenario and row["scenario"] != scenario:
                continue
            rows.append(row)
        return rows

    @app.get("/api/phs/{phs_id}")
    def get_phs(phs_id: str) -> dict:
        project = store.snapshot()
        phs = project.phs_by_id(phs_id)
        if phs is None:
            raise NotFoundError(f"no such row: {phs_id}")
        return _phs_detail(project, phs)

    @app.post("/api/phs/{phs_id}/decision")
    def post_decision(phs_id: str, body: DecisionBody) -> dict:
        state = store.record_decision(DecisionCommand(
            phs=phs_id,
            new_status=_parse_status(body.new_status),
            rationale=body.rationale,
            reviewer=body.reviewer,
            expected_version=body.expected_version,
        ))
        result = review_to_dict(state)
        result["phs"] = phs_id
        return result

    @app.post("/api/hazards")
    def post_hazard(body: HazardBody) -> dict:
        hazard = store.create_hazard(
            body.phs_id, body.source, body.target,
            body.initiating_mechanism, body.description,
            _parse_target_kind(body.target_kind))
        return hazard_to_dict(hazard)

    @app.post("/api/hazards/{hazard_id}/trace")
    def post_trace(hazard_id: str, body: TraceBody | None = None
                   ) -> list[dict]:
        catalog = body.catalog if body else None
        links = store.trace_malfunctions(hazard_id, catalog)
        return [trace_to_dict(link) for link in links]

    @app.get("/api/report")
    def get_report() -> dict:
        return store.summary().to_dict()

    @app.get("/api/compare")
    def get_compare(catalog: str | None = None) -> dict:
        project = store.snapshot()
        return compare_strategies(
            project, find_catalog(project, catalog)).to_dict()

    if ui_dir and (Path(ui_dir) / "index.html").is_file():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/", include_in_schema=False)
        def index() -> HTMLResponse:
            return HTMLResponse(FALLBACK_PAGE)

    return app
