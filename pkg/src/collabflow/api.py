"""HTTP API over the project pipeline, versioned under ``/v1``.

Payloads are JSON mirrors of the file formats; error responses carry the
same machine-readable codes and diagnostics as the CLI. When a built
frontend is available its static files are served at the root.
"""
from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .errors import (
    CollabflowError,
    IncompleteProcess,
    MalformedQuery,
    NoDependencies,
    ParseError,
    ProjectStateError,
    UnknownAbstractService,
    UnknownGateway,
    UnknownInstance,
    UnknownProject,
    UnknownRole,
    UnsupportedType,
    ValidationError,
)
from .network import doc_from_dict, doc_to_xml
from .project import ProjectStore
from .query import canned_queries, run_query, serialize_results
from .rules import dump_rules
from .seed import load_seed
from .vocab import CONCEPTS

_STATUS_BY_ERROR = (
    (UnknownProject, 404),
    (UnknownGateway, 404),
    (UnknownInstance, 404),
    (ProjectStateError, 409),
    (IncompleteProcess, 409),
    (NoDependencies, 409),
    (ValidationError, 400),
    (UnsupportedType, 400),
    (ParseError, 400),
    (MalformedQuery, 400),
    (UnknownRole, 400),
    (UnknownAbstractService, 400),
)


def _http_status(exc: CollabflowError) -> int:
    for error_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status
    return 400


def _error_payload(exc: CollabflowError) -> dict:
    payload = {"code": exc.code, "message": str(exc)}
    diagnostics = getattr(exc, "diagnostics", None)
    if diagnostics:
        payload["diagnostics"] = [d.to_dict() for d in diagnostics]
    return {"error": payload}


def create_app(store: ProjectStore, frontend_dir: "Path | str | None" = None) -> FastAPI:
    app = FastAPI(title="collabflow", version="0.1.0")

    @app.exception_handler(CollabflowError)
    async def _collabflow_error(_request: Request, exc: CollabflowError):
        return JSONResponse(status_code=_http_status(exc), content=_error_payload(exc))

    @app.post("/v1/projects", status_code=201)
    def create_project(body: dict):
        project = store.create(str(body.get("name", "")), seed=body.get("seed"))
        return project.to_dict()

    @app.get("/v1/projects")
    def list_projects():
        return [p.to_dict() for p in store.list()]

    @app.get("/v1/projects/{project_id}")
    def get_project(project_id: str):
        return store.get(project_id).to_dict()

    @app.put("/v1/projects/{project_id}/network")
    async def put_network(project_id: str, request: Request):
        raw = await request.body()
        content_type = request.headers.get("content-type", "")
        if "json" in content_type:
            doc = doc_from_dict(json.loads(raw.decode("utf-8")))
            text = doc_to_xml(doc)
        else:
            text = raw.decode("utf-8")
        doc = store.set_network(project_id, text)
        return doc.to_dict()

    @app.get("/v1/projects/{project_id}/network")
    def get_network(project_id: str):
        return store.network(project_id).to_dict()

    @app.post("/v1/projects/{project_id}/deduce")
    def deduce(project_id: str):
        return store.deduce(project_id).to_dict()

    @app.get("/v1/projects/{project_id}/facts")
    def facts(
        project_id: str,
        provenance: str | None = Query(default=None),
        rule: str | None = Query(default=None),
    ):
        return store.facts(project_id, provenance=provenance, rule=rule)

    @app.post("/v1/projects/{project_id}/assemble")
    def assemble(project_id: str, body: dict | None = None):
        literal = bool((body or {}).get("literalStartRule", False))
        return store.assemble(project_id, literal_start_rule=literal).to_dict()

    @app.get("/v1/projects/{project_id}/process")
    def process(project_id: str):
        return store.graph(project_id).to_dict()

    @app.patch("/v1/projects/{project_id}/gateways/{gateway_id}")
    def patch_gateway(project_id: str, gateway_id: str, body: dict):
        return store.assign_gateway(project_id, gateway_id, str(body.get("type", "")))

    @app.get("/v1/projects/{project_id}/diagnostics")
    def diagnostics(project_id: str):
        return store.diagnostics(project_id)

    @app.post("/v1/projects/{project_id}/export")
    def export(project_id: str, pretty: bool = Query(default=True)):
        data = store.export(project_id, pretty=pretty)
        return Response(content=data, media_type="application/xml")

    @app.get("/v1/projects/{project_id}/export.bpmn")
    def download(project_id: str):
        data = store.exported_bytes(project_id)
        return Response(
            content=data,
            media_type="application/xml",
            headers={"Content-Disposition": f'attachment; filename="{project_id}.bpmn"'},
        )

    @app.get("/v1/projects/{project_id}/query")
    def query_project(project_id: str, name: str | None = None, text: str | None = None):
        kb = store.kb(project_id)
        if name is not None:
            queries = canned_queries()
            if name not in queries:
                raise MalformedQuery(f"unknown canned query {name!r}")
            table = run_query(kb, queries[name])
        elif text is not None:
            table = run_query(kb, text)
        else:
            raise MalformedQuery("provide ?name= or ?text=")
        return Response(content=serialize_results(table), media_type="application/xml")

    @app.get("/v1/seed/entries")
    def seed_entries(q: str = Query(default="")):
        kb = load_seed(store.seed)
        needle = q.casefold()
        out = []
        for instance in kb.instances():
            if needle and needle not in instance.label.casefold():
                continue
            out.append(
                {
                    "id": instance.id,
                    "label": instance.label,
                    "concepts": sorted(instance.concepts),
                }
            )
        return out

    @app.get("/v1/rules", response_class=PlainTextResponse)
    def rules():
        return dump_rules()

    @app.get("/v1/vocabulary")
    def vocabulary():
        return {"concepts": sorted(CONCEPTS)}

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
