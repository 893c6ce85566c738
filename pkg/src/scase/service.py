"""HTTP evaluation service: the engine behind the what-if explorer.

The service holds an immutable baseline snapshot (case, matrix, challenge
sets) loaded at startup and never writes to the input files.  What-if state
is per session: overrides travel inside each evaluate request, and
invalidations accumulate in memory under a session token (the
``X-Session-Token`` header, defaulting to one shared session) until reset.

Endpoints (all responses carry ``schema_version``):

* ``GET  /api/health``      liveness probe
* ``GET  /api/case``        full case: metadata, nodes, edges, tags
* ``GET  /api/catalog``     built-in argument templates
* ``GET  /api/matrix``      the loaded risk matrix
* ``GET  /api/challenges``  loaded risk-case files
* ``GET  /api/lint``        all lint findings, challenges included
* ``POST /api/evaluate``    overrides -> risk estimate (optional sensitivities)
* ``POST /api/invalidate``  revoke (or restore with ``revert``) one node
* ``POST /api/reset``       drop all session invalidations

Errors: 400 malformed request, 404 unknown node, 409 evaluation on a case
with validation errors; bodies are finding-style documents.
"""

from __future__ import annotations

from typing import Iterable, Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import payloads
from .aggregation import evaluate_case, sensitivity
from .casefile import ChallengeSet, RiskMatrix
from .catalog import apply_invalidation, builtin_catalog, run_all_lints
from .errors import EvaluationError, GraphError, ScaseError
from .matrix import default_matrix
from .model import SafetyCase, validate_graph


def _json_response(payload: dict, status_code: int = 200) -> Response:
    return Response(
        content=payloads.to_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error_response(status_code: int, code: str, message: str, node: Optional[str] = None) -> Response:
    return _json_response(
        {
            "schema_version": payloads.SCHEMA_VERSION,
            "findings": [
                {"code": code, "severity": "error", "node": node, "message": message, "location": None}
            ],
        },
        status_code=status_code,
    )


def build_app(
    case: SafetyCase,
    matrix: Optional[RiskMatrix] = None,
    challenge_sets: Iterable[ChallengeSet] = (),
) -> FastAPI:
    matrix = matrix if matrix is not None else default_matrix()
    challenge_sets = tuple(challenge_sets)
    app = FastAPI(title="scase", docs_url=None, redoc_url=None)
    # The explorer UI is served from a separate origin (static files).
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["Content-Type", "X-Session-Token"],
    )
    sessions: dict[str, set[str]] = {}

    def session_for(request: Request) -> set[str]:
        token = request.headers.get("x-session-token", "default")
        return sessions.setdefault(token, set())

    def session_view(request: Request) -> SafetyCase:
        view = case
        for nid in sorted(session_for(request)):
            view = apply_invalidation(view, nid)
        return view

    async def read_body(request: Request) -> dict:
        raw = await request.body()
        if not raw:
            return {}
        import json

        body = json.loads(raw)
        if not isinstance(body, dict):
            raise ValueError("request body must be a JSON object")
        return body

    @app.get("/api/health")
    def health() -> Response:
        return _json_response({"status": "ok", "schema_version": payloads.SCHEMA_VERSION})

    @app.get("/api/case")
    def get_case() -> Response:
        return _json_response(payloads.case_payload(case))

    @app.get("/api/catalog")
    def get_catalog() -> Response:
        return _json_response(payloads.catalog_payload(builtin_catalog()))

    @app.get("/api/matrix")
    def get_matrix() -> Response:
        return _json_response(payloads.matrix_payload(matrix))

    @app.get("/api/challenges")
    def get_challenges() -> Response:
        return _json_response(payloads.challenges_payload(challenge_sets))

    @app.get("/api/lint")
    def get_lint() -> Response:
        graph_findings = validate_graph(case)
        payload = payloads.findings_payload(graph_findings)
        try:
            _, lint_findings = run_all_lints(case, challenge_sets, builtin_catalog())
        except ScaseError as exc:
            return _error_response(400, exc.code, exc.message)
        payload["findings"].extend(payloads.lint_finding_payload(f) for f in lint_findings)
        return _json_response(payload)

    @app.post("/api/evaluate")
    async def post_evaluate(request: Request) -> Response:
        try:
            body = await read_body(request)
        except ValueError as exc:
            return _error_response(400, "BAD_REQUEST", f"malformed request body: {exc}")
        overrides = body.get("overrides", {})
        if not isinstance(overrides, dict):
            return _error_response(400, "BAD_REQUEST", "overrides must map node ids to probabilities")
        try:
            overrides = {str(k): float(v) for k, v in overrides.items()}
        except (TypeError, ValueError):
            return _error_response(400, "BAD_REQUEST", "override probabilities must be numbers")
        include_sensitivity = bool(body.get("include_sensitivity", False))
        try:
            delta = float(body.get("sensitivity_delta", 0.01))
        except (TypeError, ValueError):
            return _error_response(400, "BAD_REQUEST", "sensitivity_delta must be a number")

        view = session_view(request)
        try:
            estimate = evaluate_case(view, overrides)
        except GraphError as exc:
            return _error_response(409, exc.code, exc.message)
        except EvaluationError as exc:
            if exc.code == "UNKNOWN_OVERRIDE":
                return _error_response(404, exc.code, exc.message)
            return _error_response(400, exc.code, exc.message)

        sensitivities = None
        if include_sensitivity:
            if delta < 0:
                return _error_response(400, "BAD_REQUEST", "sensitivity_delta must be non-negative")
            sensitivities = {}
            for nid, node in view.nodes.items():
                if node.leaf_p is not None or nid in overrides:
                    sensitivities[nid] = sensitivity(view, overrides, nid, delta)
        return _json_response(payloads.estimate_payload(estimate, sensitivities))

    @app.post("/api/invalidate")
    async def post_invalidate(request: Request) -> Response:
        try:
            body = await read_body(request)
        except ValueError as exc:
            return _error_response(400, "BAD_REQUEST", f"malformed request body: {exc}")
        node = body.get("node")
        if not isinstance(node, str) or not node:
            return _error_response(400, "BAD_REQUEST", "body must carry a node id")
        if node not in case.nodes:
            return _error_response(404, "UNKNOWN_REFERENCE", f"unknown node {node!r}", node=node)
        session = session_for(request)
        if body.get("revert", False):
            session.discard(node)
        else:
            session.add(node)
        view = session_view(request)
        payload = {
            "schema_version": payloads.SCHEMA_VERSION,
            "invalidated": sorted(session),
        }
        try:
            estimate = evaluate_case(view, {})
            payload["estimate"] = payloads.estimate_payload(estimate)
        except (GraphError, EvaluationError) as exc:
            payload["estimate"] = None
            payload["error"] = {"code": exc.code, "message": exc.message}
        return _json_response(payload)

    @app.post("/api/reset")
    async def post_reset(request: Request) -> Response:
        session_for(request).clear()
        return _json_response({"schema_version": payloads.SCHEMA_VERSION, "invalidated": []})

    return app
